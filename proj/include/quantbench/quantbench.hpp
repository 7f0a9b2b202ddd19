#pragma once

#include <quantbench/bench.hpp>
#include <quantbench/core.hpp>
#include <quantbench/errors.hpp>
#include <quantbench/experiment.hpp>
#include <quantbench/io.hpp>
#include <quantbench/model.hpp>
#include <quantbench/random.hpp>
#include <quantbench/report.hpp>
#include <quantbench/serialize.hpp>
#include <quantbench/transforms.hpp>
