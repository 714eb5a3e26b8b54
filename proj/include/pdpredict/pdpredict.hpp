#pragma once

#include "pdpredict/bayesnet.hpp"
#include "pdpredict/boostlr.hpp"
#include "pdpredict/csv.hpp"
#include "pdpredict/dataset.hpp"
#include "pdpredict/error.hpp"
#include "pdpredict/forest.hpp"
#include "pdpredict/metrics.hpp"
#include "pdpredict/mlp.hpp"
#include "pdpredict/model_io.hpp"
#include "pdpredict/pipeline.hpp"
#include "pdpredict/preprocess.hpp"
#include "pdpredict/random.hpp"
#include "pdpredict/report.hpp"
#include "pdpredict/synthgen.hpp"
