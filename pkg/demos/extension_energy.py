"""Build the triangulated extension of a boundary map and watch its energies.

Each strip n is the band 2^-(n+1) < y <= 2^-n with three triangles per merged
group. We print the per-strip forward energy (Phi of the largest singular
value) and inverse energy (Psi of the reciprocal smallest one, weighted by the
Jacobian), then the homeomorphism audit. Pass an output path to also write an
SVG picture of the mesh.
"""

import sys

from biorlicz import boundary, extension, nfunc, reports

bh = boundary.power_map(0.5)
mesh = extension.build_extension(bh, 12)
rep = extension.energy_report(mesh, nfunc.power(3), nfunc.power(2))

print(f"{mesh.triangle_count} triangles over {mesh.depth} strips")
print(" strip   forward term    inverse term   min jacobian")
for n in range(mesh.depth):
    print(f"  {n:3d}  {rep.forward.terms[n]:.6e}  {rep.inverse.terms[n]:.6e}  "
          f"{rep.min_jacobian[n]:.4f}")
print(f"verdicts: forward {rep.forward.verdict}, inverse {rep.inverse.verdict}")

audit = extension.homeo_audit(mesh)
print(f"audit passed: {audit.passed} (min jacobian {audit.min_jacobian:.4f}, "
      f"interface mismatch {audit.interface_mismatch:.1e})")

if len(sys.argv) > 1:
    reports.write_svg(sys.argv[1], mesh)
    print(f"wrote {sys.argv[1]}")
