//! The imitation term and its combination with the policy objective.

use nalgebra::DMatrix;

/// Mean squared error between the learner's actions and the reference
/// controller's actions, averaged over batch entries and action
/// dimensions. Both inputs are act_dim × batch in normalized units.
pub fn guidance_mse(actions: &DMatrix<f64>, references: &DMatrix<f64>) -> f64 {
    assert_eq!(actions.shape(), references.shape(), "batch shape mismatch");
    let n = actions.len() as f64;
    actions
        .iter()
        .zip(references.iter())
        .map(|(a, r)| (a - r) * (a - r))
        .sum::<f64>()
        / n
}

/// Total objective for the policy network: the reinforcement-learning term
/// plus the faded imitation term.
pub fn actor_loss(policy_loss: f64, guidance_loss: f64, beta: f64) -> f64 {
    policy_loss + beta * guidance_loss
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cols(data: &[[f64; 2]]) -> DMatrix<f64> {
        let flat: Vec<f64> = data.iter().flatten().copied().collect();
        DMatrix::from_column_slice(2, data.len(), &flat)
    }

    #[test]
    fn identical_batches_have_zero_loss() {
        let a = cols(&[[0.3, -0.7], [1.0, 0.0]]);
        assert_eq!(guidance_mse(&a, &a), 0.0);
    }

    #[test]
    fn unit_offset_batch_of_one_gives_one() {
        let a = cols(&[[0.0, 0.0]]);
        let r = cols(&[[1.0, 1.0]]);
        assert_eq!(guidance_mse(&a, &r), 1.0);
    }

    #[test]
    fn random_batch_matches_scalar_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: Vec<[f64; 2]> = (0..17).map(|_| [rng.gen(), rng.gen()]).collect();
        let r: Vec<[f64; 2]> = (0..17).map(|_| [rng.gen(), rng.gen()]).collect();
        let mut expect = 0.0;
        for (x, y) in a.iter().zip(&r) {
            expect += (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
        }
        expect /= (17 * 2) as f64;
        let got = guidance_mse(&cols(&a), &cols(&r));
        assert!((got - expect).abs() < 1e-14, "{got} vs {expect}");
    }

    #[test]
    fn combined_loss_is_affine_in_beta() {
        assert_eq!(actor_loss(2.0, 0.5, 4.0), 4.0);
        assert_eq!(actor_loss(2.0, 0.5, 0.0), 2.0);
        assert_eq!(actor_loss(2.0, 0.0, 123.0), 2.0);
    }
}
