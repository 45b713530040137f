//! Point clouds, file ingestion, neighbor search and baseline samplers.

mod cloud;
mod io;
mod knn;
mod samplers;

pub use cloud::{dist, dist2, normalize_unit_sphere, Point3, PointCloud};
pub use io::{load_pointcloud, parse_pointcloud, write_ply_ascii, write_xyz, CloudFormat};
pub use knn::{knn, knn_with, neighbor_frequency, NeighborSearch, NeighborTable};
pub use samplers::{sample_fps, sample_random, sample_voxel, sample_voxel_target, FpsStart};
