use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{ldexp, Arc, CarlesonBox, DiscPoint, Turn};

/// Vertex `(n, k)` of the Bergman tree, embedded as
/// `z(k, n) = (1 - 2^-n) e^{2πik / 2^n}` with `1 ≤ k ≤ 2^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TreeNode {
    n: u32,
    k: BigUint,
}

impl TreeNode {
    pub fn root() -> Self {
        TreeNode { n: 0, k: BigUint::one() }
    }

    pub fn new(n: u32, k: BigUint) -> Result<Self> {
        if k.is_zero() || k > (BigUint::one() << n) {
            return Err(Error::Input(format!("tree index {k} outside [1, 2^{n}]")));
        }
        Ok(TreeNode { n, k })
    }

    pub fn from_u64(n: u32, k: u64) -> Result<Self> {
        Self::new(n, BigUint::from(k))
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn index(&self) -> &BigUint {
        &self.k
    }

    /// `σ₊(n, k) = (n + 1, 2k)`: the child along the same ray.
    pub fn plus(&self) -> TreeNode {
        TreeNode {
            n: self.n + 1,
            k: &self.k << 1u32,
        }
    }

    /// `σ₋(n, k) = (n + 1, 2k - 1)`.
    pub fn minus(&self) -> TreeNode {
        TreeNode {
            n: self.n + 1,
            k: (&self.k << 1u32) - 1u32,
        }
    }

    /// `σ₊^j`.
    pub fn plus_pow(&self, j: u32) -> TreeNode {
        TreeNode {
            n: self.n + j,
            k: &self.k << j,
        }
    }

    /// `σ₋^j(n, k) = (n + j, 2^j (k - 1) + 1)`.
    pub fn minus_pow(&self, j: u32) -> TreeNode {
        TreeNode {
            n: self.n + j,
            k: ((&self.k - 1u32) << j) + 1u32,
        }
    }

    pub fn parent(&self) -> Result<TreeNode> {
        if self.n == 0 {
            return Err(Error::Domain("the root has no parent".into()));
        }
        Ok(TreeNode {
            n: self.n - 1,
            k: ((&self.k - 1u32) >> 1u32) + 1u32,
        })
    }

    /// The ancestor at `level`, or `None` if `level` is deeper than `self`.
    pub fn ancestor(&self, level: u32) -> Option<TreeNode> {
        (level <= self.n).then(|| TreeNode {
            n: level,
            k: ((&self.k - 1u32) >> (self.n - level)) + 1u32,
        })
    }

    /// Strictly below `other` in the tree order.
    pub fn is_below(&self, other: &TreeNode) -> bool {
        self.n > other.n && self.ancestor(other.n).as_ref() == Some(other)
    }

    /// Position of `self` among the `2^d` descendants of `ancestor`
    /// at relative depth `d`, where bit `j` (from the top) selects `σ₊`.
    pub(crate) fn relative_index(&self, ancestor: &TreeNode) -> BigUint {
        let d = self.n - ancestor.n;
        (&self.k - 1u32) - ((&ancestor.k - 1u32) << d)
    }

    /// The level-`n` node whose dyadic box contains the angle `t` (turns).
    pub fn at_turn(n: u32, t: f64) -> Result<TreeNode> {
        if !t.is_finite() {
            return Err(Error::Input(format!("angle {t} is not finite")));
        }
        let k = Turn::from_turns(t).dyadic_floor(n) + 1u32;
        TreeNode::new(n, k)
    }

    pub fn turn(&self) -> Turn {
        Turn::from_ratio(&self.k, self.n)
    }

    pub fn point(&self) -> DiscPoint {
        if self.n == 0 {
            return DiscPoint::origin();
        }
        DiscPoint::from_depth(self.turn(), ldexp(1.0, -(self.n as i64))).expect("depth 2^-n is in (0, 1)")
    }

    /// The dyadic box `{ 1 - 2^-n ≤ r < 1, arg ∈ [(k-1)/2^n, k/2^n] }`.
    ///
    /// These are the boxes that realize the tree order: a child's box is
    /// one half of its parent's. The point `z(k, n)` sits on the box's
    /// counterclockwise edge.
    pub fn dyadic_box(&self) -> CarlesonBox {
        if self.n == 0 {
            return CarlesonBox::new(Arc::full_circle(), 1.0).expect("unit depth");
        }
        let size = ldexp(1.0, -(self.n as i64));
        let center = self.turn().add_turns(-0.5 * size);
        CarlesonBox::new(Arc::from_turn(center, size).expect("size in (0, 1)"), size).expect("depth in (0, 1)")
    }

    /// Tree distance to the root.
    pub fn tree_distance_to_root(&self) -> u32 {
        self.n
    }
}

impl fmt::Debug for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.k)
    }
}

/// Parent, children and root path of a node.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeStructure {
    pub node: TreeNode,
    pub level: u32,
    pub parent: Option<TreeNode>,
    pub plus: TreeNode,
    pub minus: TreeNode,
    /// From the node up to and including the root.
    pub path_to_root: Vec<TreeNode>,
}

pub fn tree_structure(node: &TreeNode) -> TreeStructure {
    let mut path = vec![node.clone()];
    while let Ok(p) = path.last().unwrap().parent() {
        path.push(p);
    }
    TreeStructure {
        node: node.clone(),
        level: node.n,
        parent: node.parent().ok(),
        plus: node.plus(),
        minus: node.minus(),
        path_to_root: path,
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IndexRepr {
    Small(u64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct NodeRepr {
    n: u32,
    k: IndexRepr,
}

impl Serialize for TreeNode {
    /// `{"n", "k"}`; indices past `u64` are written as decimal strings.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let k = match self.k.to_u64() {
            Some(v) => IndexRepr::Small(v),
            None => IndexRepr::Big(self.k.to_string()),
        };
        NodeRepr { n: self.n, k }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreeNode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = NodeRepr::deserialize(d)?;
        let k = match repr.k {
            IndexRepr::Small(v) => BigUint::from(v),
            IndexRepr::Big(s) => s.parse().map_err(D::Error::custom)?,
        };
        TreeNode::new(repr.n, k).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn children_of_root() {
        let s = tree_structure(&TreeNode::root());
        assert_eq!(s.plus, TreeNode::from_u64(1, 2).unwrap());
        assert_eq!(s.minus, TreeNode::from_u64(1, 1).unwrap());
        assert!(s.parent.is_none());
        assert!(TreeNode::root().parent().is_err());
    }

    #[test]
    fn parent_inverts_children() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(0..40);
            let a = TreeNode::from_u64(n, rng.gen_range(1..=1u64 << n)).unwrap();
            assert_eq!(a.plus().parent().unwrap(), a);
            assert_eq!(a.minus().parent().unwrap(), a);
            assert_eq!(a.minus_pow(7), (0..7).fold(a.clone(), |x, _| x.minus()));
            assert_eq!(a.plus_pow(5).ancestor(n).unwrap(), a);
            assert!(a.minus_pow(3).is_below(&a));
            assert!(!a.is_below(&a));
        }
    }

    #[test]
    fn path_to_root_has_level_plus_one_nodes() {
        let a = TreeNode::from_u64(6, 37).unwrap();
        let s = tree_structure(&a);
        assert_eq!(s.path_to_root.len(), 7);
        assert_eq!(s.path_to_root.last().unwrap(), &TreeNode::root());
    }

    #[test]
    fn dyadic_boxes_nest() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let n = rng.gen_range(0..50);
            let a = TreeNode::from_u64(n, rng.gen_range(1..=1u64 << n)).unwrap();
            let b = a.dyadic_box();
            assert!(b.contains_box(&a.minus().dyadic_box()));
            assert!(b.contains_box(&a.plus().dyadic_box()));
            assert!(b.contains(&a.minus().point()));
            assert!(b.contains(&a.point()) || n == 0);
        }
    }

    #[test]
    fn embedding_matches_formula() {
        let a = TreeNode::from_u64(3, 3).unwrap();
        let z = a.point();
        assert!((z.abs() - 0.875).abs() < 1e-15);
        assert!((z.theta() - std::f64::consts::TAU * 3.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip_with_big_index() {
        let a = TreeNode::root().plus_pow(200).minus();
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.contains('"'));
        assert_eq!(serde_json::from_str::<TreeNode>(&json).unwrap(), a);
        let small: TreeNode = serde_json::from_str(r#"{"n": 3, "k": 5}"#).unwrap();
        assert_eq!(small, TreeNode::from_u64(3, 5).unwrap());
        assert!(serde_json::from_str::<TreeNode>(r#"{"n": 3, "k": 9}"#).is_err());
    }
}
