//! Fixtures shared by the benchmarks.

use bimodal_core::hilbert::SpaceLayout;
use bimodal_core::numkit::{projector, CMatrix};
use bimodal_core::opensys::{lindblad_generator, DecayRates, Lindbladian};
use bimodal_core::protocols::build_protocol;
use bimodal_core::{ProtocolName, ProtocolOptions, ProtocolSpec, Result};

pub fn protocol(name: ProtocolName) -> ProtocolSpec {
    build_protocol(name, &ProtocolOptions::default()).expect("default options are feasible")
}

/// Bell-primed W scheme on `n` qubits; the space has dimension `4·2^n`.
pub fn primed(n: usize) -> ProtocolSpec {
    let opts = ProtocolOptions {
        n: Some(n),
        ..ProtocolOptions::default()
    };
    build_protocol(ProtocolName::WnPrototype, &opts).expect("default options are feasible")
}

/// Generator with every channel at rate `chi`, and the protocol's initial density.
pub fn dissipative(spec: &ProtocolSpec, chi: f64) -> Result<(Lindbladian, CMatrix)> {
    let layout: SpaceLayout = spec.layout()?;
    let rates = if layout.has_modes() {
        DecayRates::new(chi, chi, chi)?
    } else {
        DecayRates::qubit_only(chi)?
    };
    let l = lindblad_generator(&spec.hamiltonian()?, &rates, &layout)?;
    Ok((l, projector(&spec.initial)))
}
