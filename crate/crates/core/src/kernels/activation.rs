use crate::model::ActivationKind;
use crate::tensor::Tensor;

pub fn relu(x: f32) -> f32 {
    x.max(0.0)
}

pub fn relu6(x: f32) -> f32 {
    x.clamp(0.0, 6.0)
}

pub fn activation(input: &Tensor, kind: ActivationKind) -> Tensor {
    match kind {
        ActivationKind::Relu => input.map(relu),
        ActivationKind::Relu6 => input.map(relu6),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn relu6_clips() {
        assert_eq!(relu6(-1.0), 0.0);
        assert_eq!(relu6(3.0), 3.0);
        assert_eq!(relu6(7.0), 6.0);
    }

    #[test]
    fn relu_elementwise() {
        let t = Tensor::vector(vec![-2.0, 0.0, 8.0]).unwrap();
        assert_eq!(
            activation(&t, ActivationKind::Relu).data(),
            &[0.0, 0.0, 8.0]
        );
        assert_eq!(
            activation(&t, ActivationKind::Relu6).data(),
            &[0.0, 0.0, 6.0]
        );
    }
}
