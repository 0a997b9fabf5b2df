//! Simulation and analysis of entanglement-distribution protocols on small
//! qubit registers.
//!
//! The crate covers three ways of producing distant Bell pairs
//!
//! * entanglement swapping on two Bell pairs,
//! * X measurements along a linear cluster state,
//! * measurement-based quantum network coding (MQNC) on the butterfly network,
//!
//! together with a single-qubit depolarizing noise model, an exact
//! density-matrix evaluator, a Monte Carlo trajectory sampler and the usual
//! two-qubit figures of merit (fidelity, concurrence, CHSH value, state
//! tomography). A graph-state rewrite engine in [`graph`] serves as an
//! independent check of every measurement-based protocol.
//!
//! Qubit 0 is the least-significant bit of every amplitude index.
//!
//! ```
//! use mqnc::protocols::{build_mqnc, MqncStage, Mode};
//!
//! let proto = build_mqnc(MqncStage::Step2Onward, None, Mode::FeedForward).unwrap();
//! let out = proto.evaluate_exact(&mqnc::noise::NoiseModel::noiseless()).unwrap();
//! for pair in out.pair_fidelities().unwrap() {
//!     assert!((pair - 1.0).abs() < 1e-9);
//! }
//! ```

pub mod analysis;
pub mod circuit;
pub mod clifford;
pub mod error;
pub mod experiment;
pub mod gate;
pub mod graph;
pub(crate) mod linalg;
pub mod noise;
pub mod pauli;
pub mod protocols;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use circuit::{Circuit, Op};
pub use gate::{Gate, GateKind};
pub use pauli::{Pauli, PauliString, Phase};
pub use state::{DensityMatrix, Fill, MeasurementBasis, PureState, QubitIndex};
