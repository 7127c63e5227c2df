"""Clustering of 2D power angular spectrum maps.

Marker-controlled watershed segmentation with K-Power-Means baselines, a
synthetic directional-channel generator, comparison metrics and a batch
benchmark harness.
"""

from .channel import (AntennaModel, ChannelCluster, ChannelParams,
                      ChannelRealization, NoiseSpec, Ray, add_noise_speckles,
                      antenna_gain, antenna_gain_db, cluster_fields,
                      generate_channel, spatial_snr_stats, synthesize_pas)
from .distance import DistanceMap, edt, geodesic_distance, influence_zones, skiz
from .grid import (AngularGrid, BinaryMask, LabelMap, LevelMap, PasMap,
                   StructuringElement, from_db, grid_for_shape, quantize,
                   quantize_uniform, to_db)
from .kpm import (KpmConfig, KpmResult, ModifiedKpmResult, WeightedPoint,
                  kpm_assign, kpm_modified, kpm_standard, kpm_standard_pas, mcd)
from .metrics import (BenchReport, BenchRow, ClusterMetrics,
                      cluster_count_ratio, power_concentration, run_benchmark,
                      split_power_ratio)
from .morphology import (MorphConfig, average_filter, closing, despeckle_smooth,
                         dilate, enhance_contrast, erode, geodesic_dilate_step,
                         laplacian, opening, reconstruct, regional_maxima)
from .threshold import (ThresholdParams, otsu_background, otsu_split_db,
                        power_threshold)
from .watershed import (MarkerSet, WatershedConfig, background_markers,
                        cluster_pas, flood_watershed, foreground_markers,
                        marker_flood_watershed)

__version__ = "0.1.0"
