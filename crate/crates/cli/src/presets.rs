use clap::ValueEnum;
use padic_rmt::ensembles::{AmbientDim, EnsembleKind, EnsembleSpec, ExactProb};
use padic_rmt::hall_littlewood::rational;
use padic_rmt::{Prime, Signature};

use crate::error::{CliError, CliResult};

/// Named ensembles that reproduce the standard examples with one flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Deterministic `A_k = diag(1, p^{2^{k-1}})`, the non-split example.
    #[value(name = "paper-counterexample")]
    Counterexample,
    /// `FixedSN((1,0))`.
    #[value(name = "fixed-10")]
    Fixed10,
    /// `SNMixture({(1,0): 1/2, (0,0): 1/2})`.
    #[value(name = "mixture-10")]
    Mixture10,
    /// Top 2×2 corner of Haar `GL_3(ℤₚ)`.
    #[value(name = "corner-haar-3")]
    CornerHaar3,
    /// `GSpFixedSN((2,1,1,0))` in `GSp_4`.
    Gsp4Demo,
    /// `FixedSN((1,1))`: a scalar step with degenerate fluctuations.
    Scalar,
}

impl Preset {
    pub fn spec(self, p: Option<u64>) -> CliResult<EnsembleSpec> {
        let p = Prime::new(p.unwrap_or(2)).map_err(CliError::from)?;
        let sig = |v: &[i64]| Signature::new(v.to_vec()).expect("preset signatures are sorted");
        let (n, kind) = match self {
            Preset::Counterexample => (2, EnsembleKind::Counterexample),
            Preset::Fixed10 => (2, EnsembleKind::FixedSN(sig(&[1, 0]))),
            Preset::Mixture10 => (
                2,
                EnsembleKind::SNMixture(vec![
                    (sig(&[1, 0]), ExactProb(rational(1, 2))),
                    (sig(&[0, 0]), ExactProb(rational(1, 2))),
                ]),
            ),
            Preset::CornerHaar3 => (2, EnsembleKind::CornerOfHaar(AmbientDim::Finite(3))),
            Preset::Gsp4Demo => (4, EnsembleKind::GSpFixedSN(sig(&[2, 1, 1, 0]))),
            Preset::Scalar => (2, EnsembleKind::FixedSN(sig(&[1, 1]))),
        };
        Ok(EnsembleSpec::new(p, n, kind)?)
    }

    /// Run length used when `--kmax` is not given.
    pub fn default_k_max(self) -> Option<u64> {
        match self {
            Preset::Counterexample => Some(20),
            _ => None,
        }
    }

    pub fn all() -> &'static [Preset] {
        &[
            Preset::Counterexample,
            Preset::Fixed10,
            Preset::Mixture10,
            Preset::CornerHaar3,
            Preset::Gsp4Demo,
            Preset::Scalar,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for &p in Preset::all() {
            let spec = p.spec(Some(3)).unwrap();
            spec.validate().unwrap();
        }
    }
}
