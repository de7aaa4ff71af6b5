"""Co-arrest network analysis toolkit.

Builds an undirected weighted social network from arrest records and runs
three analyses on it: degree-of-membership inference for people who do not
disclose a gang affiliation, seed-set identification under the majority
tipping model, and modularity-based sub-group / ecosystem mapping.
"""

from .community import (
    Connector,
    Ecosystem,
    Partition,
    build_ecosystem,
    find_connectors,
    louvain,
    modularity,
)
from .graph import (
    CoArrestNetwork,
    PersonNode,
    build_network,
    connected_components,
    induced_subgraph,
)
from .ingest import (
    ArrestRecord,
    CsvDialect,
    CsvParseError,
    IngestError,
    RelationshipRecord,
    SchemaError,
    derive_coarrest_edges,
    merge_edges,
    parse_arrests,
    parse_relationships,
    relationship_edges,
)
from .membership import (
    InfluenceFunction,
    MembershipState,
    infer_membership,
    learn_influence,
    membership_histogram,
)
from .synth import SynthConfig, generate
from .tipping import (
    CascadeResult,
    SeedSetResult,
    find_seed_set,
    seed_set_report,
    shell_numbers,
    simulate_cascade,
)

__version__ = "0.1.0"
