#pragma once

#include "blowup/integer.hpp"
#include "blowup/error.hpp"
#include "blowup/exact_linalg.hpp"
#include "blowup/forest.hpp"
#include "blowup/state.hpp"
#include "blowup/labels.hpp"
#include "blowup/history.hpp"
#include "blowup/worked_examples.hpp"
#include "blowup/checks.hpp"
#include "blowup/enumerate.hpp"
#include "blowup/io.hpp"
#include "blowup/repl.hpp"
#include "blowup/cli.hpp"
