"""Integer tags shared between the region layer and the batch kernels."""

TAG_TRIANGLE = 0  # vertices (0,0), (s,0), (s,s); params (s, -, -, -)
TAG_ROT_TRIANGLE = 1  # 90 degree CCW image of TAG_TRIANGLE; params (s, -, -, -)
TAG_DISK = 2  # punctured disk; params (radius, -, -, -)
TAG_ANNULUS = 3  # params (inner radius, outer radius, -, -)
TAG_BOX = 4  # params (x0, x1, y0, y1)
TAG_HALF_DISK = 5  # upper closed half disk; params (radius, -, -, -)

PROFILE_SEGMENT = 0
PROFILE_DISK = 1
PROFILE_RECT = 2

# per-lattice candidate budget for point enumeration
ENUM_CAP = 100_000_000
