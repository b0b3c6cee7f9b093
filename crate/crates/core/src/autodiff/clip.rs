//! Gradient clipping.

use crate::autodiff::tape::Gradients;

/// How the clipping threshold is applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClipMode {
    /// Rescale all gradients jointly when their global L2 norm exceeds the threshold.
    #[default]
    GlobalNorm,
    /// Clamp each entry to `[-threshold, threshold]`.
    Elementwise,
}

/// Global-norm clipping: if the L2 norm over every gradient exceeds
/// `threshold`, all gradients are scaled by `threshold / norm`.
pub fn clip_gradients(grads: Gradients, threshold: f64) -> Gradients {
    clip_with(grads, threshold, ClipMode::GlobalNorm)
}

pub fn clip_with(mut grads: Gradients, threshold: f64, mode: ClipMode) -> Gradients {
    assert!(threshold > 0.0, "clip threshold must be positive");
    match mode {
        ClipMode::GlobalNorm => {
            let norm = grads.global_norm();
            if norm > threshold {
                let factor = threshold / norm;
                for (_, g) in grads.iter_mut() {
                    g.scale_in_place(factor);
                }
            }
        }
        ClipMode::Elementwise => {
            for (_, g) in grads.iter_mut() {
                for v in g.data_mut() {
                    *v = v.clamp(-threshold, threshold);
                }
            }
        }
    }
    grads
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::ParamId;
    use crate::tensor::Tensor;

    fn grads(parts: &[&[f64]]) -> Gradients {
        let mut g = Gradients::new();
        for (i, p) in parts.iter().enumerate() {
            g.insert(ParamId(i), Tensor::vector(p.to_vec()).unwrap());
        }
        g
    }

    #[test]
    fn scales_down_large_norm() {
        let out = clip_gradients(grads(&[&[6.0, 8.0]]), 5.0);
        assert_eq!(out.get(ParamId(0)).unwrap().data(), &[3.0, 4.0]);
    }

    #[test]
    fn small_norm_untouched() {
        let out = clip_gradients(grads(&[&[1.0, 1.0]]), 5.0);
        assert_eq!(out.get(ParamId(0)).unwrap().data(), &[1.0, 1.0]);
    }

    #[test]
    fn global_norm_across_tensors() {
        // 12^2 + 16^2 = 400 -> combined norm 20 -> factor 0.25
        let out = clip_gradients(grads(&[&[12.0], &[16.0], &[0.0, 0.0]]), 5.0);
        assert_eq!(out.get(ParamId(0)).unwrap().data(), &[3.0]);
        assert_eq!(out.get(ParamId(1)).unwrap().data(), &[4.0]);
        assert_eq!(out.get(ParamId(2)).unwrap().data(), &[0.0, 0.0]);
    }

    #[test]
    fn empty_map_is_fine() {
        assert!(clip_gradients(Gradients::new(), 5.0).is_empty());
    }

    #[test]
    fn elementwise_mode_clamps() {
        let out = clip_with(grads(&[&[-9.0, 2.0, 7.0]]), 5.0, ClipMode::Elementwise);
        assert_eq!(out.get(ParamId(0)).unwrap().data(), &[-5.0, 2.0, 5.0]);
    }
}
