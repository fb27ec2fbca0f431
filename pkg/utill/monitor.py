import psutil


def getcpumsg():
    memory = psutil.virtual_memory()
    return {
        'cpu_logical': psutil.cpu_count(logical=True),
        'cpu_physical': psutil.cpu_count(logical=False),
        'memory': {
            'total': memory.total,  # 总物理内存
            'available': memory.available,
        },
    }


def resolve_workers(requested: int) -> int:
    """cap the requested worker count at the cores present"""
    cores = psutil.cpu_count(logical=True) or 1
    return max(1, min(int(requested), cores))
