'''Frame-Stewart numbers, constructed solutions and exact optima of the
generalized Tower of Hanoi.'''
__version__ = '0.1.0'
