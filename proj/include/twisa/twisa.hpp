#pragma once

#include "twisa/corpus.hpp"
#include "twisa/dates.hpp"
#include "twisa/error.hpp"
#include "twisa/model_io.hpp"
#include "twisa/pipeline.hpp"
#include "twisa/sentiment.hpp"
#include "twisa/temporal.hpp"
#include "twisa/topicmodel.hpp"
