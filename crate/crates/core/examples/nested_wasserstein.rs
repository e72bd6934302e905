//! Distance between meta-measures and the contraction of the barycenter map.

use otclass::kantorovich::wasserstein;
use otclass::random;
use otclass::transport_class::{generalized_barycenter, meta_wasserstein, MetaMeasure};
use otclass::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    println!("{:>10}  {:>12}  {:>12}", "pair", "W(N1, N2)", "W1(β1, β2)");
    for k in 0..6 {
        let n1: MetaMeasure<f64> = random::meta_measure(&mut rng, 3, 4, 2, 5);
        let n2: MetaMeasure<f64> = random::meta_measure(&mut rng, 2, 4, 2, 5);
        let outer = meta_wasserstein(&n1, &n2)?;
        let inner = wasserstein(1.0, &generalized_barycenter(&n1)?, &generalized_barycenter(&n2)?)?;
        println!("{k:>10}  {outer:>12.6}  {inner:>12.6}");
    }
    Ok(())
}
