#pragma once

#include "panokit/error.hpp"
#include "panokit/tensor.hpp"
#include "panokit/rng.hpp"
#include "panokit/parallel.hpp"
#include "panokit/sphere_geom.hpp"
#include "panokit/dft.hpp"
#include "panokit/noise_field.hpp"
#include "panokit/denoise.hpp"
#include "panokit/decode_pad.hpp"
#include "panokit/plugins.hpp"
#include "panokit/pano_metrics.hpp"
#include "panokit/curator/clip_record.hpp"
#include "panokit/curator/segmentation.hpp"
#include "panokit/curator/optical_flow.hpp"
#include "panokit/curator/pipeline.hpp"
#include "panokit/io/tensor_file.hpp"
#include "panokit/io/png_frames.hpp"
#include "panokit/io/records_io.hpp"
