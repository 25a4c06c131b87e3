//! Spring-mass-damper graphs and their matrix assembly.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dof::{DofKind, DofLabel};
use crate::error::Error;
use crate::frf::FrfQuantity;
use crate::model::{OutputKind, StateSpaceModel};
use crate::Scalar;

/// Stiffness/damping pair of a spring-damper element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringDamper<T> {
    pub k: T,
    pub c: T,
}

/// A point mass, optionally grounded through a spring-damper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LumpedNode<T> {
    pub name: String,
    pub mass: T,
    #[serde(default = "none_spring")]
    pub grounded_spring: Option<SpringDamper<T>>,
}

fn none_spring<T>() -> Option<SpringDamper<T>> {
    None
}

/// Spring-damper between two nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LumpedEdge<T> {
    pub node_a: String,
    pub node_b: String,
    #[serde(flatten)]
    pub spring: SpringDamper<T>,
}

/// A spring-mass-damper graph with one translational DOF per node.
#[derive(Debug, Clone, PartialEq)]
pub struct LumpedSystem<T: Scalar> {
    pub(crate) name: String,
    pub(crate) nodes: Vec<LumpedNode<T>>,
    pub(crate) edges: Vec<LumpedEdge<T>>,
    pub(crate) interface_nodes: Vec<String>,
}

impl<T: Scalar> LumpedSystem<T> {
    pub fn new(
        name: impl Into<String>,
        nodes: Vec<LumpedNode<T>>,
        edges: Vec<LumpedEdge<T>>,
        interface_nodes: Vec<String>,
    ) -> Result<Self, Error> {
        let sys = LumpedSystem {
            name: name.into(),
            nodes,
            edges,
            interface_nodes,
        };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<(), Error> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidParameter {
                what: "lumped system",
                detail: "needs at least one node".to_string(),
            });
        }
        for n in &self.nodes {
            if n.mass < T::zero() {
                return Err(Error::InvalidParameter {
                    what: "node mass",
                    detail: format!("node '{}' has negative mass", n.name),
                });
            }
            if let Some(s) = &n.grounded_spring {
                if s.k < T::zero() || s.c < T::zero() {
                    return Err(Error::InvalidParameter {
                        what: "grounded spring",
                        detail: format!("node '{}' has negative k or c", n.name),
                    });
                }
            }
            if self.nodes.iter().filter(|o| o.name == n.name).count() > 1 {
                return Err(Error::DuplicateLabel {
                    label: n.name.clone(),
                    context: "lumped nodes".to_string(),
                });
            }
        }
        for e in &self.edges {
            if e.spring.k < T::zero() || e.spring.c < T::zero() {
                return Err(Error::InvalidParameter {
                    what: "edge spring",
                    detail: format!("edge {}-{} has negative k or c", e.node_a, e.node_b),
                });
            }
            for end in [&e.node_a, &e.node_b] {
                if self.node_index(end).is_none() {
                    return Err(Error::UnknownLabel {
                        label: end.clone(),
                        context: "lumped edge endpoint".to_string(),
                    });
                }
            }
        }
        for i in &self.interface_nodes {
            if self.node_index(i).is_none() {
                return Err(Error::UnknownLabel {
                    label: i.clone(),
                    context: "interface node list".to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn nodes(&self) -> &[LumpedNode<T>] {
        &self.nodes
    }
    pub fn edges(&self) -> &[LumpedEdge<T>] {
        &self.edges
    }
    pub fn interface_nodes(&self) -> &[String] {
        &self.interface_nodes
    }
    pub fn n_dof(&self) -> usize {
        self.nodes.len()
    }

    fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// DOF labels in node order; interface kind per `interface_nodes`.
    pub fn dof_labels(&self) -> Vec<DofLabel> {
        self.nodes
            .iter()
            .map(|n| {
                let kind = if self.interface_nodes.iter().any(|i| i == &n.name) {
                    DofKind::Interface
                } else {
                    DofKind::Internal
                };
                DofLabel {
                    name: n.name.clone(),
                    kind,
                    structure: self.name.clone(),
                }
            })
            .collect()
    }

    /// Assembles mass, stiffness and damping matrices.
    ///
    /// `M = diag(masses)`; each edge adds `+k` to both diagonal entries and
    /// `-k` off-diagonal; a grounded spring adds `+k` to its node's diagonal.
    /// `V` is assembled identically from the damping values.
    pub fn assemble_mkv(&self) -> (DMatrix<T>, DMatrix<T>, DMatrix<T>) {
        let n = self.nodes.len();
        let mut m = DMatrix::zeros(n, n);
        let mut k = DMatrix::zeros(n, n);
        let mut v = DMatrix::zeros(n, n);
        for (i, node) in self.nodes.iter().enumerate() {
            m[(i, i)] = node.mass;
            if let Some(s) = &node.grounded_spring {
                k[(i, i)] += s.k;
                v[(i, i)] += s.c;
            }
        }
        for e in &self.edges {
            let i = self.node_index(&e.node_a).expect("validated");
            let j = self.node_index(&e.node_b).expect("validated");
            k[(i, i)] += e.spring.k;
            k[(j, j)] += e.spring.k;
            k[(i, j)] -= e.spring.k;
            k[(j, i)] -= e.spring.k;
            v[(i, i)] += e.spring.c;
            v[(j, j)] += e.spring.c;
            v[(i, j)] -= e.spring.c;
            v[(j, i)] -= e.spring.c;
        }
        (m, k, v)
    }

    /// Builds the state-space model of the requested output kind.
    pub fn to_model(&self, kind: OutputKind) -> Result<StateSpaceModel<T>, Error> {
        let (m, k, v) = self.assemble_mkv();
        StateSpaceModel::from_mkv(self.name.clone(), &m, &k, &v, kind, self.dof_labels())
    }

    /// Builds the inverted (apparent-mass) model directly, without any
    /// matrix inversion:
    ///
    /// ```text
    /// A = [0 0; I 0],  B = [I; 0],  C = [V K],  D = M (+ eps I)
    /// ```
    ///
    /// Inputs are accelerations, outputs forces. Valid for singular or zero
    /// mass matrices, which is what makes primal disassembly of massless
    /// elements possible.
    pub fn apparent_mass_model(&self, residue: Option<&ResidueSpec<T>>) -> Result<StateSpaceModel<T>, Error> {
        let (m, k, v) = self.assemble_mkv();
        let n = self.n_dof();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((n, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
        let mut b = DMatrix::zeros(2 * n, n);
        b.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
        let mut c = DMatrix::zeros(n, 2 * n);
        c.view_mut((0, 0), (n, n)).copy_from(&v);
        c.view_mut((0, n), (n, n)).copy_from(&k);
        let mut d = m;
        if let Some(r) = residue {
            r.check()?;
            for i in 0..n {
                d[(i, i)] += r.epsilon;
            }
        }
        StateSpaceModel::new(
            self.name.clone(),
            a,
            b,
            c,
            d,
            OutputKind::Force,
            FrfQuantity::ApparentMass,
            self.dof_labels(),
            self.dof_labels(),
            false,
        )
    }

    /// Copy of the system with `eps` added to every node mass.
    ///
    /// Equivalent to attaching small virtual masses at the element DOFs so
    /// that an acceleration model (whose feed-through is `M^-1`) exists.
    pub fn with_virtual_masses(&self, residue: &ResidueSpec<T>) -> Result<Self, Error> {
        residue.check()?;
        let mut sys = self.clone();
        for n in &mut sys.nodes {
            n.mass += residue.epsilon;
        }
        Ok(sys)
    }
}

/// Small virtual mass used to regularize massless connecting elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueSpec<T> {
    pub epsilon: T,
}

impl<T: Scalar> ResidueSpec<T> {
    pub fn new(epsilon: T) -> Result<Self, Error> {
        let r = ResidueSpec { epsilon };
        r.check()?;
        Ok(r)
    }

    fn check(&self) -> Result<(), Error> {
        if !(self.epsilon > T::zero()) {
            return Err(Error::InvalidParameter {
                what: "residue epsilon",
                detail: "must be > 0".to_string(),
            });
        }
        Ok(())
    }
}

/// Default residue mass in kg.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Adds the residue-mass term to a model's feed-through matrix.
///
/// For an acceleration model (`D = M^-1`) the increment is `(1/eps) I`,
/// matching a build with virtual masses `eps I`. For a force-kind
/// apparent-mass model (`D = M`) the increment is `eps I` directly.
pub fn add_residue_mass<T: Scalar>(
    model: &StateSpaceModel<T>,
    residue: &ResidueSpec<T>,
) -> Result<StateSpaceModel<T>, Error> {
    residue.check()?;
    let term = match (model.output_kind(), model.quantity()) {
        (OutputKind::Acceleration, _) => T::one() / residue.epsilon,
        (OutputKind::Force, FrfQuantity::ApparentMass) => residue.epsilon,
        (kind, _) => {
            return Err(Error::WrongOutputKind {
                op: "add_residue_mass",
                expected: "acceleration or apparent-mass",
                found: kind.as_str().to_string(),
            })
        }
    };
    if model.d.nrows() != model.d.ncols() {
        return Err(Error::dims(
            "add_residue_mass D",
            "square".to_string(),
            format!("{}x{}", model.d.nrows(), model.d.ncols()),
        ));
    }
    let mut out = model.clone();
    for i in 0..out.d.nrows() {
        out.d[(i, i)] += term;
    }
    Ok(out)
}

/// The built-in two-component benchmark assembly.
///
/// Two lumped components are joined by two spring-damper mounts; fixture
/// assemblies (two 2 kg masses around each mount) support the in-situ
/// identification workflow, and a monolithic model of the full assembly
/// serves as ground truth.
pub mod testcase {
    use super::*;
    use crate::frf::FrequencyGrid;

    fn sd<T: Scalar>(k: f64, c: f64) -> SpringDamper<T> {
        SpringDamper {
            k: T::from_f64(k).unwrap(),
            c: T::from_f64(c).unwrap(),
        }
    }

    fn node<T: Scalar>(name: &str, mass: f64, grounded: Option<(f64, f64)>) -> LumpedNode<T> {
        LumpedNode {
            name: name.to_string(),
            mass: T::from_f64(mass).unwrap(),
            grounded_spring: grounded.map(|(k, c)| sd(k, c)),
        }
    }

    fn edge<T: Scalar>(a: &str, b: &str, k: f64, c: f64) -> LumpedEdge<T> {
        LumpedEdge {
            node_a: a.to_string(),
            node_b: b.to_string(),
            spring: sd(k, c),
        }
    }

    /// Component A: grounded chain a1 with branches to the interface
    /// masses a2 and a3.
    pub fn component_a<T: Scalar>() -> LumpedSystem<T> {
        LumpedSystem::new(
            "A",
            vec![
                node("a1", 10.0, Some((1.5e5, 30.0))),
                node("a2", 3.0, None),
                node("a3", 3.0, None),
            ],
            vec![edge("a1", "a2", 5e5, 50.0), edge("a1", "a3", 4.5e5, 50.0)],
            vec!["a2".to_string(), "a3".to_string()],
        )
        .expect("valid by construction")
    }

    /// Component B: free-free star around p3, interfaces p1 and p2.
    pub fn component_b<T: Scalar>() -> LumpedSystem<T> {
        LumpedSystem::new(
            "B",
            vec![
                node("p1", 5.0, None),
                node("p2", 7.0, None),
                node("p3", 10.0, None),
                node("p4", 1.0, None),
            ],
            vec![
                edge("p1", "p3", 1e5, 50.0),
                edge("p2", "p3", 1.5e5, 50.0),
                edge("p3", "p4", 5e3, 10.0),
            ],
            vec!["p1".to_string(), "p2".to_string()],
        )
        .expect("valid by construction")
    }

    /// Mount 1 (k = 1e5, c = 20) between fixture masses, custom fixture mass.
    pub fn mount_m1_with_fixture_mass<T: Scalar>(fixture_mass: f64) -> LumpedSystem<T> {
        LumpedSystem::new(
            "m1_fixtures",
            vec![node("T1", fixture_mass, None), node("T2", fixture_mass, None)],
            vec![edge("T1", "T2", 1e5, 20.0)],
            vec!["T1".to_string(), "T2".to_string()],
        )
        .expect("valid by construction")
    }

    /// Mount 1 between the standard 2 kg fixtures.
    pub fn mount_m1_with_fixtures<T: Scalar>() -> LumpedSystem<T> {
        mount_m1_with_fixture_mass(2.0)
    }

    /// Mount 2 (k = 2e5, c = 20) between fixture masses, custom fixture mass.
    pub fn mount_m2_with_fixture_mass<T: Scalar>(fixture_mass: f64) -> LumpedSystem<T> {
        LumpedSystem::new(
            "m2_fixtures",
            vec![node("T3", fixture_mass, None), node("T4", fixture_mass, None)],
            vec![edge("T3", "T4", 2e5, 20.0)],
            vec!["T3".to_string(), "T4".to_string()],
        )
        .expect("valid by construction")
    }

    /// Mount 2 between the standard 2 kg fixtures.
    pub fn mount_m2_with_fixtures<T: Scalar>() -> LumpedSystem<T> {
        mount_m2_with_fixture_mass(2.0)
    }

    /// Mount 1 alone (massless spring-damper between its two end DOFs).
    pub fn mount_m1_bare<T: Scalar>() -> LumpedSystem<T> {
        LumpedSystem::new(
            "m1",
            vec![node("m1a", 0.0, None), node("m1b", 0.0, None)],
            vec![edge("m1a", "m1b", 1e5, 20.0)],
            vec!["m1a".to_string(), "m1b".to_string()],
        )
        .expect("valid by construction")
    }

    /// Mount 2 alone.
    pub fn mount_m2_bare<T: Scalar>() -> LumpedSystem<T> {
        LumpedSystem::new(
            "m2",
            vec![node("m2a", 0.0, None), node("m2b", 0.0, None)],
            vec![edge("m2a", "m2b", 2e5, 20.0)],
            vec!["m2a".to_string(), "m2b".to_string()],
        )
        .expect("valid by construction")
    }

    /// Full assembly: A and B joined by the mount spring-dampers directly
    /// (mounts massless). Seven DOFs.
    pub fn assembled_monolith<T: Scalar>() -> LumpedSystem<T> {
        LumpedSystem::new(
            "monolith",
            vec![
                node("a1", 10.0, Some((1.5e5, 30.0))),
                node("a2", 3.0, None),
                node("a3", 3.0, None),
                node("p1", 5.0, None),
                node("p2", 7.0, None),
                node("p3", 10.0, None),
                node("p4", 1.0, None),
            ],
            vec![
                edge("a1", "a2", 5e5, 50.0),
                edge("a1", "a3", 4.5e5, 50.0),
                edge("p1", "p3", 1e5, 50.0),
                edge("p2", "p3", 1.5e5, 50.0),
                edge("p3", "p4", 5e3, 10.0),
                edge("a2", "p1", 1e5, 20.0),
                edge("a3", "p2", 2e5, 20.0),
            ],
            vec![
                "a2".to_string(),
                "a3".to_string(),
                "p1".to_string(),
                "p2".to_string(),
            ],
        )
        .expect("valid by construction")
    }

    /// All benchmark systems.
    pub struct TestCase<T: Scalar> {
        pub component_a: LumpedSystem<T>,
        pub component_b: LumpedSystem<T>,
        pub mount_m1_with_fixtures: LumpedSystem<T>,
        pub mount_m2_with_fixtures: LumpedSystem<T>,
        pub assembled_monolith: LumpedSystem<T>,
    }

    pub fn components<T: Scalar>() -> TestCase<T> {
        TestCase {
            component_a: component_a(),
            component_b: component_b(),
            mount_m1_with_fixtures: mount_m1_with_fixtures(),
            mount_m2_with_fixtures: mount_m2_with_fixtures(),
            assembled_monolith: assembled_monolith(),
        }
    }

    /// Default verification grid: 0.5 to 50 Hz, 1024 linear lines.
    pub fn default_grid<T: Scalar>() -> FrequencyGrid<T> {
        FrequencyGrid::linear_hz(
            T::from_f64(0.5).unwrap(),
            T::from_f64(50.0).unwrap(),
            1024,
        )
        .expect("static grid")
    }

    /// Mount connection pairs of the assembly: (component-A side, component-B side).
    pub fn mount_pairs() -> [(&'static str, &'static str); 2] {
        [("A/a2", "B/p1"), ("A/a3", "B/p2")]
    }
}
