//! SPICE netlist and analysis-deck emission.
