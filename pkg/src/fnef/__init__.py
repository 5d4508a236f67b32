"""Exact verification of symmetric divisor positivity via graph weightings.

The package decides, in exact rational arithmetic, whether symmetric divisor
classes on the n-marked genus-zero moduli space admit invariant multigraph
weightings compatible with prescribed boundary strata: rational solutions
witness semi-ampleness behaviour on the symmetrization, integral ones
base-point freeness at a given multiple. Cone geometry (facets, extremal
rays, Hilbert bases), orbit enumeration of zero-dimensional strata, the
feasibility solvers, certificate plumbing, and the campaign driver all live
in their own modules; everything user-facing is re-exported here.
"""

from .cones import (HilbertBasis, LatticeMap, RationalCone, build_fnef_cone,
                    dd_extremal_rays, extremal_rays, hilbert_basis,
                    normalize_lattice)
from .divisors import (FCurvePartition, SymDivisorB, SymDivisorCA, as_b, as_ca,
                       divisor_from_json_dict, divisor_from_text,
                       divisor_to_json_dict, divisor_to_text,
                       enumerate_fcurve_partitions, epsilon,
                       f_curve_intersection, is_f_nef, is_integral)
from .feasibility import (BudgetExceeded, Certificate, FarkasWitness,
                          GraphWeighting, IlpVerdict, LinearSystemSpec,
                          LpVerdict, Row, build_intersection_slice, build_slice,
                          decide_integral, decide_rational, ilp_feasible,
                          lp_feasible, point_violations, stratum_in_base_locus,
                          verify_certificate, verify_farkas, verify_payload,
                          weighting_from_point, witness_to_json_dict)
from .pipeline import (BaseLocusComponent, CampaignConfig, CellVerdict,
                       VerdictTable, analyze_base_locus, generator_divisors,
                       least_feasible_multiplier, report, run_bpf_campaign,
                       run_campaign, run_semiample_campaign)
from .rational import format_q, parse_q, parse_q_list
from .trees import (FPointOrbit, StableTree, Stratum, canonical_shape_code,
                    enumerate_fpoint_orbits, enumerate_tree_shapes, orbit_size,
                    stabilizer_order, strata_isomorphic, tree_to_stratum)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
