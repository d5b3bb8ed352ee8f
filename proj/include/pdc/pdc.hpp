#pragma once

#include "pdc/bitstream.hpp"
#include "pdc/diffusion.hpp"
#include "pdc/error.hpp"
#include "pdc/file_io.hpp"
#include "pdc/huffman.hpp"
#include "pdc/info_nce.hpp"
#include "pdc/kmeans.hpp"
#include "pdc/merge_chain.hpp"
#include "pdc/metrics.hpp"
#include "pdc/pseudo_labels.hpp"
#include "pdc/quantize.hpp"
#include "pdc/spectrum.hpp"
#include "pdc/sweep.hpp"
#include "pdc/tensor.hpp"
