from django.db import models
from django.utils import timezone


class VerificationRun(models.Model):
    """One invocation of the verify command, kept when --record is given."""
    STATUS_CHOICES = [
        ('running', 'Running'),
        ('passed', 'Passed'),
        ('failed', 'Failed'),
        ('error', 'Error'),
    ]

    suites = models.CharField(max_length=200)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='running')
    seed = models.IntegerField(null=True, blank=True)
    gamma_fault = models.FloatField(null=True, blank=True)
    started_at = models.DateTimeField(default=timezone.now)
    finished_at = models.DateTimeField(null=True, blank=True)
    checks_passed = models.IntegerField(default=0)
    checks_failed = models.IntegerField(default=0)
    report = models.JSONField(default=list, blank=True)
    error_message = models.TextField(blank=True)

    class Meta:
        ordering = ['-started_at']

    def __str__(self):
        return f"Verification {self.started_at.strftime('%Y-%m-%d %H:%M')} [{self.suites}] - {self.status}"

    def duration(self):
        if self.finished_at:
            delta = self.finished_at - self.started_at
            return f"{delta.total_seconds():.1f} seconds"
        return "In progress"

    def finish(self, reports):
        """Store suite reports and settle the status."""
        self.report = [report.as_dict() for report in reports]
        self.checks_failed = sum(report.failed for report in reports)
        self.checks_passed = sum(len(report.checks) for report in reports) - self.checks_failed
        self.status = 'failed' if self.checks_failed else 'passed'
        self.finished_at = timezone.now()
        self.save()

    def fail(self, error):
        self.status = 'error'
        self.error_message = str(error)
        self.finished_at = timezone.now()
        self.save()
