from .util import util
from .util.grid import GridWindow, GridEvaluator, GridReport
from .relation import (GroundSet, SubsetMask, CostRelation, TransformTable, Verdict,
    c_dual, fiber, envelope, image_class, lattice_law_check, induced_relation, is_orqi)
from . import algebra, invariants, geometry, bodies, functional, measure
from .geometry import PointSet, HalfspaceSet, MembershipOracle
from .functional import GridFunction
from .measure import McEstimate
