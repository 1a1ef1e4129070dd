// empath.hpp - umbrella header for the empathy-detection pipeline library
#pragma once

#include "empath/analysis.hpp"
#include "empath/catalog.hpp"
#include "empath/common.hpp"
#include "empath/csv.hpp"
#include "empath/features.hpp"
#include "empath/harness.hpp"
#include "empath/ingest.hpp"
#include "empath/labels.hpp"
#include "empath/learners.hpp"
#include "empath/manifest.hpp"
#include "empath/matrix.hpp"
#include "empath/parallel.hpp"
#include "empath/rng.hpp"
#include "empath/stats.hpp"
#include "empath/synth.hpp"
#include "empath/trees.hpp"
