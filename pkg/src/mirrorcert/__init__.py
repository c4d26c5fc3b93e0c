"""Certify that regular mirror games have no perfect commuting operator strategy."""

__version__ = "0.1.0"

from .algebra import GenSymbol, NCPoly, parse_poly, format_poly, sym  # noqa: E402
from .game import (  # noqa: E402
    Game,
    MirrorStructure,
    build_game_polynomial,
    check_regularity,
    classical_value,
    find_mirror_maps,
    load_game,
    parse_game,
    validate_game,
)
from .ideal import (  # noqa: E402
    GeneratorSet,
    RewriteSystem,
    build_fg_polys,
    build_invalid_set,
    build_mirror_ideal_generators,
    build_universal_relations,
    complete,
    ideal_membership,
    reduce,
)
from .sos import Certificate, CertifyOptions, certify  # noqa: E402
from .verify import verify_certificate  # noqa: E402
