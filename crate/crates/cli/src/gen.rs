use kaczmarz_core::gen::InstanceKind;
use kaczmarz_core::io::{write_dense, write_sparse, write_vector};

use crate::args::GenArgs;
use crate::{build_instance, CmdResult, EXIT_OK};

pub fn run(args: GenArgs) -> CmdResult {
    let inst = build_instance(&args.ensemble, args.m, args.n, args.seed)?;
    if args.ensemble.kind == InstanceKind::SparseGaussian {
        write_sparse(&inst.a, &args.matrix)?;
    } else {
        write_dense(&inst.a.to_dense(), &args.matrix)?;
    }
    write_vector(&inst.b, &args.rhs)?;
    match (&args.out, &inst.planted) {
        (Some(path), Some(x)) => write_vector(x, path)?,
        (Some(_), None) => log::warn!("no planted solution for an inconsistent instance; --out ignored"),
        _ => {}
    }
    println!(
        "wrote {}x{} {} instance (nnz {}) to {}",
        inst.a.rows(),
        inst.a.cols(),
        args.ensemble.kind,
        inst.a.nnz(),
        args.matrix.display()
    );
    Ok(EXIT_OK)
}
