import asyncio
import os
import sys
from shlex import join

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


class CommandResult:
    def __init__(self, stdout, stderr, returncode):
        self.stdout = stdout.decode().strip()
        self.stderr = stderr.decode().strip()
        self.returncode = returncode


class HanoictlProcess:
    def __init__(self, proc, debug=False):
        self.queue = asyncio.Queue()
        self.proc = proc

        async def reader(stream):
            while True:
                line = await stream.readline()
                if not line:
                    self.queue.put_nowait('')
                    break
                line = line.decode().strip()
                if 'hanoictl-DEBUG:' in line:
                    print(line)
                else:
                    self.queue.put_nowait(line)

        asyncio.get_event_loop().create_task(reader(proc.stdout))

    def running(self):
        return self.proc.returncode is None

    async def lines(self):
        lines = []
        while True:
            line = await self.queue.get()
            if not line:
                break
            lines.append(line)
        await self.proc.wait()
        return lines


class HanoictlCli:
    def __init__(self, memory_gib=None, debug=False):
        self.memory_gib = memory_gib
        self.debug = debug

    async def _start(self, cmd):
        env = os.environ.copy()
        env['PYTHONPATH'] = os.pathsep.join(filter(None, [ROOT, env.get('PYTHONPATH')]))
        shell_cmd = f'{join([sys.executable, "-m", "hanoictl"])} {cmd}'

        if self.memory_gib is not None:
            env['HANOI_MEMORY_GIB'] = str(self.memory_gib)
        else:
            env.pop('HANOI_MEMORY_GIB', None)
        if self.debug:
            env['HANOICTL_DEBUG'] = '1'
        else:
            env.pop('HANOICTL_DEBUG', None)

        return await asyncio.create_subprocess_shell(
            shell_cmd,
            env=env,
            cwd=ROOT,
            stdout=asyncio.subprocess.PIPE,
            stderr=asyncio.subprocess.PIPE)

    async def start(self, cmd):
        proc = await self._start(cmd)
        return HanoictlProcess(proc)

    async def run(self, cmd):
        proc = await self._start(cmd)
        stdout, stderr = await proc.communicate()
        await proc.wait()
        return CommandResult(stdout, stderr, proc.returncode)

    async def record(self, cmd):
        '''`key: value` lines of a text-format command as a dict'''
        result = await self.run(cmd)
        assert result.returncode == 0, result.stderr
        return dict(line.split(': ', 1) for line in result.stdout.splitlines())

    async def k(self, n, p):
        return await self.record(join(['k', '--n', str(n), '--p', str(p)]))
