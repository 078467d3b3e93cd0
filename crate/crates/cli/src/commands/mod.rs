pub mod diagnose;
pub mod greeks;
pub mod reproduce;
pub mod sweep;
pub mod var;
