//! QR and peacocked-QR codec core: field arithmetic, symbol encoding,
//! distracter planning, a reference scanner and a scene simulator.

#![no_std]

extern crate alloc;

pub mod codec;
pub mod peacock;
pub mod qr;
pub mod scanner;
pub mod scene;
