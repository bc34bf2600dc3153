//! Bell scenarios, functionals and behaviors with exact rational arithmetic;
//! local and no-signaling bounds; and the monogamy trade-off between Bell
//! violations of one party against several others in no-signaling theories.
//!
//! ```
//! use bell_monogamy::{bounds, fixtures, monogamy, rational::int};
//!
//! let chsh = fixtures::chsh_prob();
//! assert_eq!(bounds::local_bound(&chsh).unwrap().value, int(3));
//!
//! let setup = monogamy::extend_scenario(&chsh).unwrap();
//! let lp = setup.monogamy_lp_max().unwrap();
//! assert_eq!(lp.value, setup.bound());
//! ```

pub mod behavior;
pub mod bounds;
pub mod cloning;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod functional;
pub mod lhv;
pub mod monogamy;
pub mod multipartite;
pub mod rational;
pub mod scenario;

pub use behavior::{Behavior, SignalingWitness};
pub use error::{Error, Result};
pub use functional::{BellFunctional, Form, TermKey};
pub use lhv::LhvModel;
pub use rational::Rational;
pub use scenario::{PartySpec, Scenario};
