//! A slingshot physics game, a vision pipeline that rebuilds the scene from
//! rendered class maps, and an agent that plans each shot by simulating it
//! in its own reconstruction of the world.

pub mod geometry;
pub mod physics;
pub mod render;
pub mod world;
pub mod perception;
pub mod planner;
pub mod agent;
