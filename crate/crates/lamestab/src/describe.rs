//! Human-readable plan of a config: sizes and solve counts, no solves.

use std::fmt::Write;

use anyhow::Result;

use lamestab_core::geometry::build_mesh;

use crate::config::ExperimentConfig;
use crate::runner::{plan, solve_counts, Experiment};

#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub vertices: usize,
    pub triangles: usize,
    pub edges: usize,
    pub nodes: usize,
    /// `2 · (vertices + edges)`.
    pub vector_dofs: usize,
    pub interior_vector_dofs: usize,
    pub forward_solves: usize,
    pub reconstructions: usize,
    pub text: String,
}

pub fn describe(cfg: &ExperimentConfig) -> Result<Plan> {
    cfg.validate()?;
    let mesh = build_mesh(cfg.domain.spec(), cfg.mesh_h)?;
    let nodes = mesh.node_count();
    let interior = (0..nodes).filter(|&n| !mesh.is_boundary_node(n)).count();
    let counts = solve_counts(cfg);
    let base = usize::from(plan(cfg).iter().any(|e| e.uses_base_solution()));
    let forward_solves = base + counts.iter().map(|c| c.1).sum::<usize>();
    let levels = &cfg.reconstruction.noise_levels;
    let reconstructions = if plan(cfg).contains(&Experiment::Reconstruction) {
        levels.iter().map(|&s| if s > 0.0 { 3 } else { 1 }).sum()
    } else {
        0
    };

    let mut t = String::new();
    if let Some(name) = &cfg.name {
        writeln!(t, "experiment: {name}")?;
    }
    writeln!(t, "domain: {:?}", cfg.domain)?;
    writeln!(
        t,
        "mesh: h = {}, {} vertices, {} triangles, {} edges, {} P2 nodes",
        cfg.mesh_h,
        mesh.vertex_count(),
        mesh.triangle_count(),
        mesh.edges().len(),
        nodes
    )?;
    writeln!(
        t,
        "P2 vector dofs: {} ({} interior)",
        2 * nodes,
        2 * interior
    )?;
    writeln!(t, "seed: {}", cfg.seed)?;
    let names: Vec<&str> = cfg.checks.iter().map(|c| c.as_str()).collect();
    writeln!(t, "checks: [{}]", names.join(", "))?;
    if base == 1 {
        writeln!(t, "  base solution: 1 forward solve")?;
    }
    for (e, n) in &counts {
        match e {
            Experiment::Family => writeln!(
                t,
                "  {}: {n} forward solves (u and v per scale over {} scales; {} distinct, u is shared)",
                e.id(),
                cfg.scales.len(),
                cfg.scales.len() + 1
            )?,
            Experiment::Reconstruction => writeln!(
                t,
                "  {}: {n} forward solve, {reconstructions} reconstructions over {} noise levels",
                e.id(),
                levels.len()
            )?,
            Experiment::Lps => writeln!(t, "  {}: base solution plus {n} frequency solves", e.id())?,
            _ => writeln!(t, "  {}: base solution", e.id())?,
        }
    }
    writeln!(t, "total forward solves: {forward_solves}")?;
    Ok(Plan {
        vertices: mesh.vertex_count(),
        triangles: mesh.triangle_count(),
        edges: mesh.edges().len(),
        nodes,
        vector_dofs: 2 * nodes,
        interior_vector_dofs: 2 * interior,
        forward_solves,
        reconstructions,
        text: t,
    })
}
