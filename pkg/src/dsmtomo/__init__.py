"""Direct sampling reconstruction for Radon data, with an FBP baseline."""

from .dsm import DsmConfig, dsm_reconstruct, normalization_field, precompute_probe_table, tau_axis
from .fbp import FbpFilterSpec, fbp_reconstruct, fbp_reconstruct_3d
from .grids import ImageGrid, Sinogram, centered_grid, read_grid, read_sinogram, write_grid, write_sinogram
from .metrics import err_l2, err_linf, normalize_index
from .noise import NoiseSpec, add_noise
from .phantoms import PhantomSpec, make_phantom
from .radon import fibonacci_hemisphere, forward_radon, uniform_angles_2d

__version__ = "0.1.0"
