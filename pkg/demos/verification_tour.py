"""Run the analytic checks on a few boundary maps.

For each map: the two-sided experiment (Douglas sums against mesh energies),
the only-if window inequality, and the maximal-function modular bound. The
last block exercises the borderline N-function t^2/log^2(e+t), whose tail
integral converges so every energy should stay bounded.
"""

from biorlicz import analysis, boundary, extension, nfunc

phi, psi = nfunc.power(3), nfunc.power(2)
for bh in (boundary.identity(), boundary.power_map(0.5), boundary.power_map(0.1)):
    v = analysis.theorem_experiment(bh, phi, psi, 12)
    mesh = v.details["mesh"]
    probes = analysis.onlyif_sweep(mesh, max_level=6)
    worst = min(p.slack for p in probes)
    fld = analysis.sample_distortion(mesh, 256)
    mx = analysis.maximal_inequality_test(fld, nfunc.power_log(2, 1), 2, 1.0)
    print(f"\n{bh!r}")
    print(f"  douglas fwd/inv {v.douglas_fwd}/{v.douglas_inv}, "
          f"energy fwd/inv {v.energy_fwd}/{v.energy_inv}, consistent {v.consistent}")
    print(f"  only-if: {len(probes)} probes, min slack {worst:.3f}")
    print(f"  maximal bound ratio {mx.ratio:.4f}")

nf = nfunc.square_over_log2()
tail = nfunc.tail_integral(nf)
print(f"\ntail integral of {nf.label}: {tail.value:.6f} ({tail.verdict})")
for bh in (boundary.power_map(0.02), boundary.cantor_approximant(8)):
    c = analysis.corollary_experiment(bh, nf, 14, first=8)
    print(f"  {bh!r}: passed {c.passed}")

