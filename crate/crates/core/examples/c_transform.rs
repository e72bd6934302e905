//! c-transforms and c-superdifferentials of a potential on a grid.

use otclass::cost::CostSpec;
use otclass::kantorovich::{c_superdifferential, c_transform, Direction, Potential};
use otclass::scalar::{ratio, Rational};
use otclass::Result;

fn main() -> Result<()> {
    let c = CostSpec::<Rational>::SquaredEuclidean;
    let xs: Vec<Vec<Rational>> = (0..4).map(|k| vec![ratio(k, 1)]).collect();
    let ys: Vec<Vec<Rational>> = [0, 2, 3].iter().map(|&k| vec![ratio(k, 1)]).collect();
    let psi = Potential::new(xs.clone(), vec![ratio(0, 1), ratio(1, 1), ratio(3, 1), ratio(4, 1)])?;

    let psi_c = c_transform(&c, &psi, &ys, Direction::XToY)?;
    let psi_cc = c_transform(&c, &psi_c, &xs, Direction::YToX)?;
    println!("ψ    {:?}", psi.values().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("ψᶜ   {:?}", psi_c.values().iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("ψᶜᶜ  {:?}", psi_cc.values().iter().map(ToString::to_string).collect::<Vec<_>>());

    for (i, x) in xs.iter().enumerate() {
        let sd = c_superdifferential(&c, &psi_cc, &ys, i)?;
        println!("∂ᶜψᶜᶜ(x = {}) = {:?}", x[0], sd.iter().map(|&j| ys[j][0].to_string()).collect::<Vec<_>>());
    }
    Ok(())
}
