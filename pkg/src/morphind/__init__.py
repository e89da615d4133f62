"""Rule induction, evaluation and category discovery for categorical linguistic instances."""
