//! Lipschitz widths, entropy numbers and the lower bounds they imply for
//! approximation by deep and shallow neural networks.
//!
//! Modules:
//! - [`spaces`]: finite compact sets, norms, the `𝒦(σ)` example
//! - [`network`]: feed-forward networks as maps from parameter vectors
//! - [`lipbounds`]: certified Lipschitz constants of those maps
//! - [`entropy`]: covering numbers, entropy numbers, covers through Lipschitz maps
//! - [`widths`]: Lipschitz-width upper bounds from explicit parametrizations
//! - [`carl`]: rate calculus linking entropy, widths and network errors
//! - [`takagi`]: hat iterates, Takagi sums and networks realizing them

pub mod carl;
pub mod entropy;
mod error;
pub mod fmt;
pub mod lipbounds;
pub mod network;
mod parallel;
pub mod spaces;
pub mod takagi;
pub mod widths;

pub use carl::{GrowthFunction, RateFunction, RateKind, WidthRecord};
pub use entropy::{Cover, CoverMode, EntropyBracket, EntropyProfile, Method, SolveMode, SolverConfig};
pub use error::{Error, Result};
pub use lipbounds::{ActKind, BoundFamily, LipschitzCertificate, NetRegime, Regime};
pub use network::{Activation, ActivationSpec, AffineLayer, FeedForwardNet, Layout, ParamVector};
pub use parallel::THREADS_ENV;
pub use spaces::{EmbeddingConstant, Norm, PointCloudSet, SigmaExampleSet};
pub use takagi::{TakagiNetwork, TakagiSpec};
pub use widths::{LipschitzParametrization, WidthEstimate};
