# -*- encoding: utf-8 -*-
"""Routines to execute the cells of an experiment grid.
"""

import multiprocessing as mp
import sys
import traceback
from collections import namedtuple

from onebatchpam.errors import CellError


class _ErrMsg(namedtuple("ErrMsg", ("type", "value", "msg"))):
    """Message representing an uncaught exception raised in the worker process.

    The exception travels as its type name and message since package
    exceptions do not survive pickling.
    """

    @classmethod
    def from_current_exception(cls):
        e_type, e_value, e_tb = sys.exc_info()
        return cls(e_type.__name__, str(e_value),
                   traceback.format_exception(e_type, e_value, e_tb))

    def format_exception(self, prefix):
        lines = []
        for item in self.msg:
            for line in item.splitlines():
                lines.append("{} {}".format(prefix, line))
        return "\n".join(lines)

    def __str__(self):
        return "{}: {}".format(self.type, self.value)

def _worker_run(conn, worker_id, run_cell, context):
    """Executed in the worker process.
    """
    with conn:
        done = False
        while not done:
            try:
                msg = conn.recv()
            except EOFError:
                raise RuntimeError("parent process of worker {} probably "
                                   "died unexpectedly.".format(worker_id))
            if msg is None:
                done = True
            else:
                try:
                    record = run_cell(context, msg)
                except (Exception, KeyboardInterrupt, SystemExit):
                    conn.send((worker_id, _ErrMsg.from_current_exception()))
                    done = True
                else:
                    conn.send((worker_id, record))

def _cell_error(cell, cause):
    return CellError(cell.label, cell.k, cell.seed, cause)

def run_concurrent_cells(cells, run_cell, context, on_record, njobs=1):
    """Run the grid *cells* in a pool of *njobs* worker processes.

    This function is executed in the master process. The scheduling is
    trivial: when a worker finished a cell the next not-yet-run cell is sent
    to it. Each result is passed to *on_record* with its cell. The first
    worker failure stops the distribution and is raised as a CellError once
    every worker is joined. *run_cell(context, cell)* must be a module level
    function and *context* picklable.
    """

    def start_cell(conn, cell):
        running[conn] = cell
        conn.send(cell)

    def stop_worker(conn):
        """Tell the worker connected to the given *conn* pipe to stop."""
        try:
            conn.send(None)
        except (BrokenPipeError, OSError):
            pass

    ncell = len(cells)
    if ncell == 0:
        return
    nproc = min(ncell, njobs)
    ### Create workers
    conns = []
    workers = []
    running = {}
    for i in range(nproc):
        my_conn, worker_conn = mp.Pipe()
        proc = mp.Process(target=_worker_run,
                          args=(worker_conn, i, run_cell, context))
        conns.append(my_conn)
        workers.append(proc)
        proc.start()
        # Only the worker owns the writable end now: its exit makes our end
        # readable (EOFError) right away.
        worker_conn.close()
    ### Distribute work
    failure = None
    try:
        t = 0
        while t < nproc:
            start_cell(conns[t], cells[t])
            t += 1
        while conns:
            for conn in mp.connection.wait(conns):
                try:
                    msg = conn.recv()
                except EOFError:
                    conns.remove(conn)
                    if conn in running and failure is None:
                        failure = _cell_error(running[conn],
                                              "worker died unexpectedly")
                    continue
                worker_id, obj = msg
                cell = running.pop(conn)
                if isinstance(obj, _ErrMsg):
                    if failure is None:
                        failure = _cell_error(cell, obj)
                        failure.traceback = obj.format_exception(
                            "[worker{}]".format(worker_id))
                    conns.remove(conn)
                    conn.close()
                    continue
                on_record(cell, obj)
                if t < ncell and failure is None:
                    start_cell(conn, cells[t])
                    t += 1
                else:
                    stop_worker(conn)
    finally:
        for conn in conns:
            stop_worker(conn)
            conn.close()
        ### Wait for workers to finish.
        for p in workers:
            p.join()
    if failure is not None:
        raise failure

def run_monoproc_cells(cells, run_cell, context, on_record):
    for cell in cells:
        try:
            record = run_cell(context, cell)
        except Exception as e:
            raise _cell_error(cell, e) from e
        on_record(cell, record)
