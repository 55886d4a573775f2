pub mod apps;
pub mod bench;
pub mod broker;
pub mod circuit;
pub mod field;
pub mod gas;
pub mod harness;
pub mod poly;
pub mod proof;
pub mod qap;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/circuits.md")]
    mod circuits {}
    #[doc = include_str!("../../../book/src/qap.md")]
    mod qap {}
    #[doc = include_str!("../../../book/src/proofs.md")]
    mod proofs {}
    #[doc = include_str!("../../../book/src/apps.md")]
    mod apps {}
    #[doc = include_str!("../../../book/src/broker.md")]
    mod broker {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/gas.md")]
    mod gas {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
