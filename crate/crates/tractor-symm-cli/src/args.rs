use clap::{Args, Parser, Subcommand, ValueEnum};
use tractor_symm::exact_tensor::Scalar;

#[derive(Parser, Debug)]
#[command(name = "tractor-symm", version, about = "Exact verification of higher symmetries of powers of the flat Laplacian")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Dimension of the flat space.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Signature as `S,S'`; implies `n = S + S'`.
    #[arg(long, global = true, value_parser = parse_signature)]
    pub signature: Option<(usize, usize)>,
    /// Power of the Laplacian.
    #[arg(long, global = true, default_value_t = 1)]
    pub k: usize,
    /// Number of form slots of the label.
    #[arg(long, global = true, default_value_t = 1)]
    pub p: usize,
    /// Number of standard-slot pairs of the label.
    #[arg(long, global = true, default_value_t = 0)]
    pub r: usize,
    /// Monomial degree for identities checked pointwise.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_degree: u32,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Run over every basis element instead of `--index`.
    #[arg(long, global = true)]
    pub all_basis: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

fn parse_signature(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected S,S' but got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solution spaces of the conformal Killing-type equations.
    Ckt {
        #[command(subcommand)]
        action: CktAction,
    },
    /// Split a solution into its parallel tractor and extract it back.
    Split(Pick),
    /// Canonical symmetries of the k-th power of the Laplacian.
    Symmetry {
        #[command(subcommand)]
        action: SymmetryAction,
    },
    /// Compose two canonical symmetries of one label and classify the result.
    Compose(Pair),
    /// Decompose the tensor product of two adjoint tractors.
    Decompose(Pair),
    /// The binomial Toeplitz matrices behind the regularity argument.
    Cmatrix {
        #[command(subcommand)]
        action: CmatrixAction,
    },
    /// Classify a seeded random symmetry and compare with its known parts.
    Classify {
        /// Number of samples drawn from the seeded stream.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Relations in the symmetry algebra.
    Algebra {
        #[command(subcommand)]
        action: AlgebraAction,
    },
    /// A fast end-to-end summary of every check family.
    Report,
}

#[derive(Subcommand, Debug)]
pub enum CktAction {
    Dim,
    Basis,
}

#[derive(Subcommand, Debug)]
pub enum SymmetryAction {
    /// Normal form and leading-term structure of one symmetry.
    Build(Pick),
    /// Check the defining identity.
    Verify(Pick),
    /// Verify every basis solution of every label with `r < k` and order at
    /// most `--order`.
    Sweep {
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum CmatrixAction {
    Det {
        #[arg(long)]
        d: usize,
    },
    Chain {
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum AlgebraAction {
    /// Product of two first-order symmetries against its four summands.
    Dec2can {
        #[command(flatten)]
        pair: Pair,
        /// Density weight; defaults to `k − n/2`.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<Scalar>,
    },
    /// The quadratic relation generating the ideal, at `w = k − n/2`.
    Ideal(Pair),
    /// Symmetries built from `(0,k)` solutions are multiples of the
    /// Laplacian power.
    Extra {
        /// Check only the first few basis solutions.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Graded dimensions of the quotient algebra.
    Graded {
        /// Largest degree in the table.
        #[arg(long, default_value_t = 4)]
        t: usize,
        /// Confirm the `(k, t)` cell by brute force.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Pick {
    /// Basis element, ignored under `--all-basis`.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Pair {
    /// First basis element.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Second basis element.
    #[arg(long, default_value_t = 0)]
    pub other: usize,
}
