//! Reference problems shipped with the crate.

use crate::kernel::{parse, SampleDomain, DEFAULT_DISK_RADIUS};
use crate::metric::Grid;
use crate::mtfunc::MtFunc;
use crate::volterra::KernelProblem;

pub const DEFAULT_NODES: usize = 1001;

#[derive(Debug, Clone)]
pub struct BundledProblem {
    pub name: &'static str,
    pub kernel: &'static str,
    pub phi: MtFunc,
    pub a: f64,
    pub b: f64,
    pub domain: SampleDomain,
}

impl BundledProblem {
    pub fn at(&self, n: usize) -> KernelProblem {
        KernelProblem::new(
            parse(self.kernel).expect("bundled kernel parses"),
            self.phi.clone(),
            Grid::new(self.a, self.b, n).expect("bundled grid is valid"),
            DEFAULT_DISK_RADIUS,
            self.domain,
        )
        .expect("bundled problem satisfies the contraction hypotheses")
    }

    pub fn problem(&self) -> KernelProblem {
        self.at(DEFAULT_NODES)
    }
}

fn constant(level: f64) -> MtFunc {
    MtFunc::constant(level).expect("valid level")
}

pub fn bundled() -> Vec<BundledProblem> {
    vec![
        BundledProblem {
            name: "cos-tau",
            kernel: "cos(tau)",
            phi: constant(0.25),
            a: 0.0,
            b: 1.0,
            domain: SampleDomain::Complex,
        },
        BundledProblem {
            name: "linear-half",
            kernel: "0.5*y",
            phi: constant(0.5),
            a: 0.0,
            b: 1.0,
            domain: SampleDomain::Complex,
        },
        // sin is only 1-Lipschitz on the real line, so this one is posed there.
        BundledProblem {
            name: "cos-sin",
            kernel: "cos(tau) + 0.25*sin(y)",
            phi: constant(0.25),
            a: 0.0,
            b: 1.0,
            domain: SampleDomain::Real,
        },
        BundledProblem {
            name: "stepped-linear",
            kernel: "exp(-tau) + 0.2*y",
            phi: MtFunc::table(vec![0.0, 0.5, 2.0], vec![0.2, 0.25, 0.3], 0.35)
                .expect("valid table"),
            a: 0.0,
            b: 2.0,
            domain: SampleDomain::Complex,
        },
    ]
}

pub fn by_name(name: &str) -> Option<BundledProblem> {
    bundled().into_iter().find(|p| p.name == name)
}
