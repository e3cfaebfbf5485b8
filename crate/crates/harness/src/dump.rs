//! Debug dumps of the kick and transition matrices.

use std::fmt::Write as _;

use kickwell_core::{KickOperator, TransitionMatrix};

use crate::csv::fmt_float;

/// Row-major CSV of `U` and `Z`, preceded by a `#` line with the dimension,
/// construction method and unitarity defect.
pub fn matrix_csv(u: &KickOperator, z: &TransitionMatrix) -> String {
    let dim = u.dim();
    let mut out = format!(
        "# dim={dim} method={:?} unitarity_defect={}\nn,m,re_u,im_u,z\n",
        u.method(),
        fmt_float(u.unitarity_defect())
    );
    let m = u.matrix();
    for r in 0..dim {
        for c in 0..dim {
            let v = m[(r, c)];
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r + 1,
                c + 1,
                fmt_float(v.re),
                fmt_float(v.im),
                fmt_float(z.get(r, c))
            );
        }
    }
    out
}
