use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "toricpo", version, about = "Potential functions, leading term equations and bulk-balanced fibers of toric manifolds")]
pub struct Cli {
    /// Truncation order of potentials, e.g. `3` or `5/2`
    #[arg(long, global = true)]
    pub trunc: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Zero tolerance in float mode
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Emit a versioned JSON report instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit with status 2 when a result is not certified
    #[arg(long, global = true)]
    pub require_certified: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Validate or build moment polytopes
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Print the potential function at a fiber
    Potential(PotentialArgs),
    /// Assemble the leading term equations at a fiber
    Leading(SystemArgs),
    /// Solve the leading term equations at a fiber
    Solve(SystemArgs),
    /// Lift a leading solution to a critical point
    #[command(subcommand)]
    Lift(LiftCmd),
    /// Classify a fiber and report bounds
    Classify(ClassifyArgs),
    /// Classify every interior grid point
    Scan(ScanArgs),
    /// Run a golden scenario, or `all`
    Repro(ReproArgs),
}

#[derive(Subcommand, Debug)]
pub enum PolytopeCmd {
    /// Check smoothness and irredundancy, list vertices
    Validate {
        /// JSON file or `example:NAME[:P1,P2,..]`
        polytope: String,
    },
    /// Print a named example as JSON-ready data
    Example {
        name: String,
        /// Comma separated rational parameters
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FiberArgs {
    /// JSON file or `example:NAME[:P1,P2,..]`
    #[arg(long)]
    pub polytope: String,
    /// Interior point, e.g. `1/3,3/10`
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
}

#[derive(Args, Debug)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub fiber: FiberArgs,
    /// Bulk deformation: JSON file or inline JSON
    #[arg(long)]
    pub bulk: Option<String>,
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    #[command(flatten)]
    pub fiber: FiberArgs,
    /// Only levels up to this one
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Facet coefficients of generalized equations, comma separated
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum LiftCmd {
    /// Build a bulk deformation making a leading solution critical
    Bulk {
        #[command(flatten)]
        fiber: FiberArgs,
        /// Leading solution in flag coordinates; defaults to the first one found
        #[arg(long, allow_hyphen_values = true)]
        solution: Option<String>,
        #[arg(long, default_value = "2")]
        order: String,
    },
    /// Newton lift of a point of the (bulk deformed) potential
    Point {
        #[command(flatten)]
        fiber: FiberArgs,
        /// Starting point in the original coordinates, comma separated
        #[arg(long, allow_hyphen_values = true)]
        solution: String,
        #[arg(long, default_value = "2")]
        order: String,
        /// Bulk deformation: JSON file or inline JSON
        #[arg(long)]
        bulk: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub fiber: FiberArgs,
    /// Also lift the first witness to this order
    #[arg(long)]
    pub lift_order: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub polytope: String,
    #[arg(long)]
    pub step: String,
    /// Restrict to a row such as `u2=3/10`
    #[arg(long)]
    pub row: Option<String>,
}

#[derive(Args, Debug)]
pub struct ReproArgs {
    pub name: String,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub step: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    /// Lift order
    #[arg(long)]
    pub order: Option<String>,
}
