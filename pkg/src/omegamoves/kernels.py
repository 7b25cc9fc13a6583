HAVE_SPEEDUPS = False

def compile_system(system):
    return None

def literal_sweep_compiled(system, compiled):
    raise NotImplementedError
