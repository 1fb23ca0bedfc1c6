use crate::error::Result;
use crate::gf2::PolyF2;
use crate::spectral::dependency_space;
use crate::subspace::Subspace;

/// Repeatedly keeps the smallest surviving index and discards every index
/// whose dependency space meets the span collected so far. Returns 0-based
/// indices.
pub fn greedy_independent_support(polys: &[PolyF2]) -> Result<Vec<usize>> {
    let m = polys.iter().map(|p| p.m()).max().unwrap_or(0);
    let spaces = polys
        .iter()
        .map(|p| dependency_space(&p.with_vars(m)?))
        .collect::<Result<Vec<_>>>()?;
    let mut v = Subspace::zero(m);
    let mut alive: Vec<usize> = (0..polys.len()).collect();
    let mut chosen = Vec::new();
    while let Some(&i) = alive.first() {
        chosen.push(i);
        v = v.sum(&spaces[i])?;
        let mut survivors = Vec::new();
        for &j in &alive[1..] {
            if v.sum(&spaces[j])?.dim() == v.dim() + spaces[j].dim() {
                survivors.push(j);
            }
        }
        alive = survivors;
    }
    Ok(chosen)
}
