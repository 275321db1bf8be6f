use super::{CodeSpec, CrcSpec};
use crate::sc::{hard_decision, CheckNode, ScTree};
use crate::{Error, Result};

fn check_len(llrs: &[f64], spec: &CodeSpec) -> Result<()> {
    if llrs.len() != spec.n() {
        return Err(Error::LengthMismatch { expected: spec.n(), got: llrs.len() });
    }
    Ok(())
}

/// Successive-cancellation decoder with reusable scratch space.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    spec: CodeSpec,
    tree: ScTree,
}

impl ScDecoder {
    pub fn new(spec: CodeSpec, check: CheckNode) -> Self {
        let tree = ScTree::new(spec.levels(), check);
        Self { spec, tree }
    }

    /// Returns `û_A`.
    pub fn decode(&mut self, llrs: &[f64]) -> Result<Vec<u8>> {
        check_len(llrs, &self.spec)?;
        self.tree.load(llrs);
        for i in 0..self.spec.n() {
            let bit = if self.spec.is_data(i) {
                hard_decision(self.tree.leaf_llr(i))
            } else {
                0
            };
            self.tree.set_decision(i, bit);
        }
        Ok(self.spec.extract(self.tree.decisions()))
    }
}

/// SC decoding with the exact check-node rule.
pub fn sc_decode(llrs: &[f64], spec: &CodeSpec) -> Result<Vec<u8>> {
    ScDecoder::new(spec.clone(), CheckNode::Exact).decode(llrs)
}

#[derive(Debug, Clone)]
struct Path {
    tree: ScTree,
    metric: f64,
}

/// SC list decoder, optionally CRC-aided.
///
/// Every path carries a penalty that grows by `|L_i|` whenever its decision
/// disagrees with the sign of its bit-channel LLR. At data positions both
/// extensions of every path are formed and the `list_size` smallest
/// penalties survive (ties keep the earlier path, and bit 0 before bit 1).
#[derive(Debug)]
pub struct ListDecoder {
    spec: CodeSpec,
    list_size: usize,
    crc: Option<CrcSpec>,
    check: CheckNode,
    paths: Vec<Path>,
    pool: Vec<ScTree>,
}

impl ListDecoder {
    pub fn new(spec: CodeSpec, list_size: usize, crc: Option<CrcSpec>, check: CheckNode) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::InvalidArgument("list size must be at least 1".into()));
        }
        if let Some(c) = &crc {
            if c.width() > spec.k() {
                return Err(Error::InvalidArgument(format!(
                    "CRC width {} exceeds code dimension {}",
                    c.width(),
                    spec.k()
                )));
            }
        }
        Ok(Self {
            spec,
            list_size,
            crc,
            check,
            paths: Vec::new(),
            pool: Vec::new(),
        })
    }

    fn fresh_tree(&mut self) -> ScTree {
        self.pool
            .pop()
            .unwrap_or_else(|| ScTree::new(self.spec.levels(), self.check))
    }

    /// Returns the `K` bits `û_A` of the chosen path (CRC bits included).
    pub fn decode(&mut self, llrs: &[f64]) -> Result<Vec<u8>> {
        check_len(llrs, &self.spec)?;
        for p in self.paths.drain(..) {
            self.pool.push(p.tree);
        }
        let mut tree = self.fresh_tree();
        tree.load(llrs);
        self.paths.push(Path { tree, metric: 0.0 });

        let mut candidates: Vec<(f64, usize, u8)> = Vec::with_capacity(2 * self.list_size);
        for i in 0..self.spec.n() {
            if !self.spec.is_data(i) {
                for p in &mut self.paths {
                    let l = p.tree.leaf_llr(i);
                    if l < 0.0 {
                        p.metric -= l;
                    }
                    p.tree.set_decision(i, 0);
                }
                continue;
            }
            candidates.clear();
            for (idx, p) in self.paths.iter_mut().enumerate() {
                let l = p.tree.leaf_llr(i);
                let m0 = p.metric + if l < 0.0 { -l } else { 0.0 };
                let m1 = p.metric + if l > 0.0 { l } else { 0.0 };
                candidates.push((m0, idx, 0));
                candidates.push((m1, idx, 1));
            }
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
            candidates.truncate(self.list_size);

            let mut uses = vec![0u8; self.paths.len()];
            for &(_, parent, _) in &candidates {
                uses[parent] += 1;
            }
            let mut old: Vec<Option<Path>> = self.paths.drain(..).map(Some).collect();
            for (slot, &u) in old.iter_mut().zip(&uses) {
                if u == 0 {
                    self.pool.push(slot.take().expect("unused path present").tree);
                }
            }
            for &(metric, parent, bit) in &candidates {
                let mut tree = if uses[parent] == 2 {
                    uses[parent] = 1;
                    let mut t = self.fresh_tree();
                    t.clone_from(&old[parent].as_ref().expect("parent present").tree);
                    t
                } else {
                    old[parent].take().expect("parent present").tree
                };
                tree.set_decision(i, bit);
                self.paths.push(Path { tree, metric });
            }
        }

        self.paths.sort_by(|a, b| a.metric.total_cmp(&b.metric));
        let mut chosen = None;
        if let Some(crc) = &self.crc {
            for p in &self.paths {
                let bits = self.spec.extract(p.tree.decisions());
                if crc.check(&bits)? {
                    chosen = Some(bits);
                    break;
                }
            }
        }
        Ok(chosen.unwrap_or_else(|| self.spec.extract(self.paths[0].tree.decisions())))
    }
}

/// SC list decoding with list size `list_size` and an optional CRC over
/// `û_A` (the CRC bits are the last `width` data positions).
pub fn scl_decode(llrs: &[f64], spec: &CodeSpec, list_size: usize, crc: Option<&CrcSpec>) -> Result<Vec<u8>> {
    ListDecoder::new(spec.clone(), list_size, crc.copied(), CheckNode::Exact)?.decode(llrs)
}
