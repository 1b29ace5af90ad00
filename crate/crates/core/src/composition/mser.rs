//! Maximally stable extremal regions, counted over both polarities.
//!
//! Pixels are quantized to 256 gray levels and added in increasing order
//! to a union-find forest (4-connectivity). Whenever a component changes at
//! a level, a component-tree node records its level and area. A node's
//! variation is `(|R(l+Δ)| − |R(l)|) / |R(l)|`, with `R(l+Δ)` its ancestor
//! at level `l+Δ`. Stable regions have variation below the limit, below
//! their parent's and no larger than any child's.

use crate::imgcore::RasterImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MserParams {
    /// Level step Δ for the stability measure.
    pub delta: u8,
    /// Minimum region area as a fraction of the image.
    pub min_area: f64,
    pub max_area: f64,
    pub max_variation: f64,
}

impl Default for MserParams {
    fn default() -> Self {
        MserParams {
            delta: 5,
            min_area: 0.0001,
            max_area: 0.25,
            max_variation: 0.25,
        }
    }
}

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    level: u8,
    area: u32,
    parent: u32,
    /// Any pixel of the component, used to find its root after merges.
    rep: u32,
}

struct Forest {
    parent: Vec<u32>,
    size: Vec<u32>,
    node: Vec<u32>,
}

impl Forest {
    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }
}

fn component_tree(levels: &[u8], width: usize, height: usize) -> Vec<Node> {
    let n = levels.len();
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); 256];
    for (i, &l) in levels.iter().enumerate() {
        buckets[l as usize].push(i as u32);
    }
    let mut forest = Forest {
        parent: vec![NONE; n],
        size: vec![0; n],
        node: vec![NONE; n],
    };
    let mut nodes: Vec<Node> = Vec::new();
    let mut orphans: Vec<u32> = Vec::new();
    let mut touched: Vec<u32> = Vec::new();
    let mut stamp = vec![u16::MAX; n];

    for (level, pixels) in buckets.iter().enumerate() {
        if pixels.is_empty() {
            continue;
        }
        for &p in pixels {
            forest.parent[p as usize] = p;
            forest.size[p as usize] = 1;
            let (x, y) = (p as usize % width, p as usize / width);
            let mut neighbors = [NONE; 4];
            if x > 0 {
                neighbors[0] = p - 1;
            }
            if x + 1 < width {
                neighbors[1] = p + 1;
            }
            if y > 0 {
                neighbors[2] = p - width as u32;
            }
            if y + 1 < height {
                neighbors[3] = p + width as u32;
            }
            for q in neighbors {
                if q == NONE || forest.parent[q as usize] == NONE {
                    continue;
                }
                let (rp, rq) = (forest.find(p), forest.find(q));
                if rp == rq {
                    continue;
                }
                for r in [rp, rq] {
                    let existing = forest.node[r as usize];
                    if existing != NONE {
                        orphans.push(existing);
                        forest.node[r as usize] = NONE;
                    }
                }
                let (big, small) = if forest.size[rp as usize] >= forest.size[rq as usize] {
                    (rp, rq)
                } else {
                    (rq, rp)
                };
                forest.parent[small as usize] = big;
                forest.size[big as usize] += forest.size[small as usize];
            }
            touched.push(p);
        }
        for &p in &touched {
            let root = forest.find(p);
            if stamp[root as usize] == level as u16 {
                continue;
            }
            stamp[root as usize] = level as u16;
            forest.node[root as usize] = nodes.len() as u32;
            nodes.push(Node {
                level: level as u8,
                area: forest.size[root as usize],
                parent: NONE,
                rep: root,
            });
        }
        for &o in &orphans {
            let root = forest.find(nodes[o as usize].rep);
            nodes[o as usize].parent = forest.node[root as usize];
        }
        touched.clear();
        orphans.clear();
    }
    nodes
}

fn count_stable(levels: &[u8], width: usize, height: usize, params: &MserParams) -> usize {
    let nodes = component_tree(levels, width, height);
    let total = levels.len() as f64;
    let variation: Vec<f64> = nodes
        .iter()
        .map(|node| {
            let target = node.level as u32 + params.delta as u32;
            let mut cur = *node;
            while cur.parent != NONE && nodes[cur.parent as usize].level as u32 <= target {
                cur = nodes[cur.parent as usize];
            }
            (cur.area - node.area) as f64 / node.area as f64
        })
        .collect();
    let mut min_child = vec![f64::INFINITY; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        if node.parent != NONE {
            let slot = &mut min_child[node.parent as usize];
            *slot = slot.min(variation[i]);
        }
    }
    nodes
        .iter()
        .enumerate()
        .filter(|(i, node)| {
            let area = node.area as f64;
            let v = variation[*i];
            area >= params.min_area * total
                && area <= params.max_area * total
                && v < params.max_variation
                && (node.parent == NONE || v < variation[node.parent as usize])
                && v <= min_child[*i]
        })
        .count()
}

/// MSER count on 8-bit gray levels, dark-on-bright plus bright-on-dark.
pub fn mser_count_gray(levels: &[u8], width: usize, height: usize, params: &MserParams) -> usize {
    assert_eq!(levels.len(), width * height, "level buffer does not match extent");
    let inverted: Vec<u8> = levels.iter().map(|&l| 255 - l).collect();
    count_stable(levels, width, height, params) + count_stable(&inverted, width, height, params)
}

pub fn mser_count(img: &RasterImage, params: &MserParams) -> crate::Result<usize> {
    let gray = match img.colorspace() {
        crate::ColorSpace::Rgb | crate::ColorSpace::Gray => img.to_gray(),
        other => {
            return Err(crate::Error::InvalidRaster(format!(
                "mser expects RGB or Gray, got {other:?}"
            )))
        }
    };
    let levels: Vec<u8> = gray.data().iter().map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8).collect();
    Ok(mser_count_gray(&levels, img.width(), img.height(), params))
}
