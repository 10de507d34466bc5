#pragma once

#include "schemetree/commands.hpp"
#include "schemetree/dot.hpp"
#include "schemetree/equivalence.hpp"
#include "schemetree/error.hpp"
#include "schemetree/executor.hpp"
#include "schemetree/natural.hpp"
#include "schemetree/oracle.hpp"
#include "schemetree/scheme.hpp"
#include "schemetree/signature.hpp"
#include "schemetree/structure.hpp"
#include "schemetree/symbolic.hpp"
#include "schemetree/syntax.hpp"
#include "schemetree/term.hpp"
#include "schemetree/treeifier.hpp"
#include "schemetree/workspace.hpp"
