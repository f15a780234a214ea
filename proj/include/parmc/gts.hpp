#pragma once

// Guarded transition system front end: finite models defined symbolically.
//
//   var <name> : <lo> .. <hi> init <value> ;
//   rule <guard> -> <name> := <expr> (, <name> := <expr>)* ;
//   prop <name> : <guard> ;
//   # comment
//
// Guards are comparisons (== != < <= > >=) over integer expressions
// (+ - * over variables and literals) combined with and/or/not (&,|,!) and
// parentheses. Assignments within one rule are simultaneous, evaluated
// against the pre-state. successors(s) applies the rules in declaration
// order and drops duplicate results; an update that leaves a variable's
// declared range is an error at exploration time.

#include "parmc/model.hpp"

#include <memory>
#include <string_view>

namespace parmc {

std::unique_ptr<Model> parse_gts(std::string_view text);
std::unique_ptr<Model> load_gts(const std::string& path);

}   // namespace parmc
