"""Numerical evidence: meshes, regularity, embeddedness, properness and symmetry."""

from hsurf.verification.bvh import BVH, build_bvh, candidate_pairs, intersecting_pairs, triangles_intersect
from hsurf.verification.mesh import Region, TriMesh, build_mesh
from hsurf.verification.obj import read_obj, write_obj
from hsurf.verification.properness import Escapes, ProbeResult, parametric_curve, properness_probe
from hsurf.verification.scans import (
    chordal_distance,
    injectivity_witness_search,
    parameter_distance,
    regularity_scan,
    self_intersection_scan,
)
from hsurf.verification.symmetry import SymmetryDescriptor, SymmetryResult, check_symmetry, symmetry_samples
from hsurf.verification.witnesses import (
    Witness,
    WitnessKind,
    format_witnesses,
    normalised_normal,
    parse_witnesses,
    sort_witnesses,
)

__all__ = [
    "BVH",
    "Escapes",
    "ProbeResult",
    "Region",
    "SymmetryDescriptor",
    "SymmetryResult",
    "TriMesh",
    "Witness",
    "WitnessKind",
    "build_bvh",
    "build_mesh",
    "candidate_pairs",
    "check_symmetry",
    "chordal_distance",
    "format_witnesses",
    "injectivity_witness_search",
    "intersecting_pairs",
    "normalised_normal",
    "parameter_distance",
    "parametric_curve",
    "parse_witnesses",
    "properness_probe",
    "read_obj",
    "regularity_scan",
    "self_intersection_scan",
    "sort_witnesses",
    "symmetry_samples",
    "triangles_intersect",
    "write_obj",
]
