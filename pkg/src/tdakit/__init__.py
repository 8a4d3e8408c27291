"""Topological data analysis toolkit.

Computes persistent homology of point clouds through Vietoris–Rips
filtrations, compares the resulting barcodes with the p-Wasserstein distance,
and ranks data partitions by their point-count-normalized Wasserstein sums.
"""

from .barcode_metrics import (Matching, WassersteinConfig, WassersteinResult,
                              interval_sup_distance, wasserstein_details,
                              wasserstein_distance)
from .errors import (CapacityError, ConfigError, EmptyInputError,
                     IncomparableBarcodesError, ParseError, TdakitError,
                     TooSmallError, UnclassifiableRecordError)
from .metric_space import (ColumnSpec, DistanceMatrix, FeatureRecord,
                           PointCloud, load_point_cloud, pairwise_distances,
                           read_records, standardize_features)
from .persistence import (Barcode, PersistenceInterval, barcode_from_text,
                          barcode_to_text, betti_numbers_at,
                          compute_persistence, read_barcode, write_barcode)
from .partition_analysis import (PartitionSpec, SweepResult, SweepRow,
                                 TemperatureBand, WassersteinReport,
                                 barcode_for, default_partition_spec,
                                 load_partition_spec, pairwise_report,
                                 partition_records, partition_size_sweep,
                                 rank_partitions, split_random_halves,
                                 with_subset_halves)
from .synthetic import MANIFOLD_KINDS, ManifoldSpec, sample
from .vr_filtration import (DEFAULT_SIMPLEX_BUDGET, FilteredSimplex,
                            Filtration, FiltrationParams, build_filtration,
                            complex_at_scale, filtration_dump_lines)

__version__ = "0.1.0"
