pub mod stabilizer;
