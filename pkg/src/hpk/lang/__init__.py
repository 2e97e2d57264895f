"""Language core: lexer, parser, typechecker, and evaluator."""
