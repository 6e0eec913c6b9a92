#pragma once

#include "analyze.hpp"
#include "annotations.hpp"
#include "app.hpp"
#include "bibtex.hpp"
#include "evaluate.hpp"
#include "features.hpp"
#include "ingest.hpp"
#include "model.hpp"
#include "paper.hpp"
#include "prompt.hpp"
#include "remote.hpp"
#include "segment.hpp"
#include "synthetic.hpp"
#include "table.hpp"
#include "taxonomy.hpp"
#include "venue.hpp"
