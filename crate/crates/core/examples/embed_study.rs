//! How many physical qubits does a clique of n logical variables cost on a
//! Chimera lattice? Growth is superlinear, which is what forces the
//! sub-problem decomposition for long trajectories.

use qubo_testgen::embed::{embed_study, embed_study_table};

fn main() -> qubo_testgen::Result<()> {
    let sizes: Vec<usize> = (1..=8).map(|k| 5 * k).collect();
    let rows = embed_study(&sizes)?;
    print!("{}", embed_study_table(&rows));

    let f = |n: usize| rows.iter().find(|r| r.problem_size == n).unwrap().physical_qubits;
    println!();
    println!(
        "NQ(40)/NQ(20) = {}/{} = {:.2}",
        f(40),
        f(20),
        f(40) as f64 / f(20) as f64
    );
    Ok(())
}
