pub mod bohm;
pub mod cli;
pub mod operational;
pub mod resource;
pub mod syntax;
pub mod taylor;
pub mod tts;
