use super::groups::GroupBall;
use crate::ainf::{AInfStructure, Element};
use crate::error::{Error, Result};
use crate::exactlin::int;
use crate::filt::FiltrationAssignment;

/// The group algebra `k[G]` truncated to a word-length ball: one object,
/// zero differential, degree 0, and products that leave the ball undefined.
#[derive(Clone, Debug)]
pub struct GroupAlgebraModel {
    ball: GroupBall,
}

impl GroupAlgebraModel {
    pub fn ball(&self) -> &GroupBall {
        &self.ball
    }

    /// Basis ids of the group generators (the words of length one).
    pub fn generators(&self) -> Vec<usize> {
        (1..self.ball.len().min(1 + self.ball.presentation().letter_count()))
            .filter(|&id| self.ball.length(id) == 1)
            .collect()
    }
}

/// The truncated group algebra with levels given by word length.
pub fn group_algebra_as_filtered_category(ball: &GroupBall) -> Result<(GroupAlgebraModel, FiltrationAssignment)> {
    if ball.radius() == 0 {
        return Err(Error::Precondition("the ball must be grown to radius at least 1".into()));
    }
    let levels = (0..ball.len()).map(|id| int(ball.length(id) as i64)).collect();
    Ok((GroupAlgebraModel { ball: ball.clone() }, FiltrationAssignment::new(levels)))
}

impl AInfStructure for GroupAlgebraModel {
    fn grading_modulus(&self) -> u32 {
        0
    }
    fn object_count(&self) -> usize {
        1
    }
    fn object_label(&self, _object: usize) -> String {
        "pt".into()
    }
    fn basis_len(&self) -> usize {
        self.ball.len()
    }
    fn source(&self, _b: usize) -> usize {
        0
    }
    fn target(&self, _b: usize) -> usize {
        0
    }
    fn degree(&self, _b: usize) -> i64 {
        0
    }
    fn basis_label(&self, b: usize) -> String {
        self.ball.label(b)
    }
    fn max_arity(&self) -> usize {
        2
    }
    fn mu(&self, inputs: &[usize]) -> Option<Element> {
        match *inputs {
            [_] => Some(Element::new()),
            [a, b] => self.ball.multiply(a, b).map(Element::unit),
            _ => Some(Element::new()),
        }
    }
    fn unit(&self, _object: usize) -> Option<Element> {
        Some(Element::unit(0))
    }
    fn is_partial(&self) -> bool {
        true
    }
}
